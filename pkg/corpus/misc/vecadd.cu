#define N 1048576

__global__ void vecadd_kernel(float *a, float *b, float *c)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if (i < N) {
        c[i] = a[i] + b[i];
    }
}

void vecadd_cuda(float* a, float* b, float* c)
{
    float *a_gpu;
    cudaMalloc((void **)&a_gpu, sizeof(float) * N);
    cudaMemcpy(a_gpu, a, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *b_gpu;
    cudaMalloc((void **)&b_gpu, sizeof(float) * N);
    cudaMemcpy(b_gpu, b, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *c_gpu;
    cudaMalloc((void **)&c_gpu, sizeof(float) * N);
    dim3 block(256, 1);
    dim3 grid(N / 256, 1);
    vecadd_kernel<<<grid, block>>>(a_gpu, b_gpu, c_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(c, c_gpu, sizeof(float) * N, cudaMemcpyDeviceToHost);
    cudaFree(a_gpu);
    cudaFree(b_gpu);
    cudaFree(c_gpu);
}
