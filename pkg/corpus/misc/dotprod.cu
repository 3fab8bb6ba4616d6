#define N 262144
#define NBLOCKS 1024

__global__ void dotprod_kernel(float *a, float *b, float *out)
{
    __shared__ float partial[256];
    int tid = threadIdx.x;
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    partial[tid] = a[i] * b[i];
    __syncthreads();
    int s;
    for (s = blockDim.x / 2; s > 0; s >>= 1) {
        if (tid < s) {
            partial[tid] += partial[tid + s];
        }
        __syncthreads();
    }
    if (tid == 0) {
        out[blockIdx.x] = partial[0];
    }
}

void dotprod_cuda(float* a, float* b, float* out)
{
    float *a_gpu;
    cudaMalloc((void **)&a_gpu, sizeof(float) * N);
    cudaMemcpy(a_gpu, a, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *b_gpu;
    cudaMalloc((void **)&b_gpu, sizeof(float) * N);
    cudaMemcpy(b_gpu, b, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *out_gpu;
    cudaMalloc((void **)&out_gpu, sizeof(float) * NBLOCKS);
    dim3 block(256, 1);
    dim3 grid(NBLOCKS, 1);
    dotprod_kernel<<<grid, block>>>(a_gpu, b_gpu, out_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(out, out_gpu, sizeof(float) * NBLOCKS, cudaMemcpyDeviceToHost);
    cudaFree(a_gpu);
    cudaFree(b_gpu);
    cudaFree(out_gpu);
}
