#define N 1048576

__global__ void saxpy_kernel(float alpha, float *x, float *y)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if (i < N) {
        y[i] = alpha * x[i] + y[i];
    }
}

void saxpy_cuda(float alpha, float* x, float* y)
{
    float *x_gpu;
    cudaMalloc((void **)&x_gpu, sizeof(float) * N);
    cudaMemcpy(x_gpu, x, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *y_gpu;
    cudaMalloc((void **)&y_gpu, sizeof(float) * N);
    cudaMemcpy(y_gpu, y, sizeof(float) * N, cudaMemcpyHostToDevice);
    dim3 block(128, 1);
    dim3 grid(N / 128, 1);
    saxpy_kernel<<<grid, block>>>(alpha, x_gpu, y_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(y, y_gpu, sizeof(float) * N, cudaMemcpyDeviceToHost);
    cudaFree(x_gpu);
    cudaFree(y_gpu);
}
