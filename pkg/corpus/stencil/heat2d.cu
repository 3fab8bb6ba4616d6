#define N 1024

__global__ void heat2d_kernel(float *U, float *V)
{
    int j = blockIdx.x * blockDim.x + threadIdx.x;
    int i = blockIdx.y * blockDim.y + threadIdx.y;
    if ((i > 0) && (i < N - 1) && (j > 0) && (j < N - 1)) {
        V[i * N + j] = 0.25f * (U[(i - 1) * N + j] + U[(i + 1) * N + j] + U[i * N + (j - 1)] + U[i * N + (j + 1)]);
    }
}

void heat2d_cuda(float* U, float* V)
{
    float *U_gpu;
    cudaMalloc((void **)&U_gpu, sizeof(float) * N * N);
    cudaMemcpy(U_gpu, U, sizeof(float) * N * N, cudaMemcpyHostToDevice);
    float *V_gpu;
    cudaMalloc((void **)&V_gpu, sizeof(float) * N * N);
    cudaMemcpy(V_gpu, V, sizeof(float) * N * N, cudaMemcpyHostToDevice);
    dim3 block(16, 16);
    dim3 grid(N / 16, N / 16);
    heat2d_kernel<<<grid, block>>>(U_gpu, V_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(V, V_gpu, sizeof(float) * N * N, cudaMemcpyDeviceToHost);
    cudaFree(U_gpu);
    cudaFree(V_gpu);
}
