#define N 65536
#define HALF 32768

__global__ void reverse_kernel(int *in, int *out)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if (i < N) {
        out[N - 1 - i] = in[i];
    }
}

void reverse_cuda(int* in, int* out)
{
    int *in_gpu;
    cudaMalloc((void **)&in_gpu, sizeof(int) * N);
    cudaMemcpy(in_gpu, in, sizeof(int) * HALF, cudaMemcpyHostToDevice);
    cudaMemcpy(in_gpu + HALF, in + HALF, sizeof(int) * HALF, cudaMemcpyHostToDevice);
    int *out_gpu;
    cudaMalloc((void **)&out_gpu, sizeof(int) * N);
    dim3 block(256, 1);
    dim3 grid(N / 256, 1);
    reverse_kernel<<<grid, block>>>(in_gpu, out_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(out, out_gpu, sizeof(int) * N, cudaMemcpyDeviceToHost);
    cudaFree(in_gpu);
    cudaFree(out_gpu);
}
