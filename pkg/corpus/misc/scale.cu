#define N 524288

__global__ void scale_kernel(float factor, float *data)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if (i < N) {
        data[i] = data[i] * factor;
    }
}

void scale_cuda(float factor, float* data)
{
    float *data_gpu;
    cudaMalloc((void **)&data_gpu, sizeof(float) * N);
    cudaMemcpy(data_gpu, data, sizeof(float) * N, cudaMemcpyHostToDevice);
    cudaMemset(data_gpu, 0, sizeof(float) * N);
    cudaMemcpy(data_gpu, data, sizeof(float) * N, cudaMemcpyHostToDevice);
    dim3 block(512, 1);
    dim3 grid(N / 512, 1);
    scale_kernel<<<grid, block>>>(factor, data_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(data, data_gpu, sizeof(float) * N, cudaMemcpyDeviceToHost);
    cudaFree(data_gpu);
}
