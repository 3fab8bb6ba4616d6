#define NI 256
#define NJ 256
#define NK 256

__global__ void gemm_kernel(float alpha, float beta, float *A, float *B, float *C)
{
    int j = blockIdx.x * blockDim.x + threadIdx.x;
    int i = blockIdx.y * blockDim.y + threadIdx.y;
    if ((i < NI) && (j < NJ)) {
        int k;
        float acc = 0.0f;
        for (k = 0; k < NK; k++) {
            acc += A[i * NK + k] * B[k * NJ + j];
        }
        C[i * NJ + j] = alpha * acc + beta * C[i * NJ + j];
    }
}

void gemm_cuda(float alpha, float beta, float* A, float* B, float* C)
{
    float *A_gpu;
    cudaMalloc((void **)&A_gpu, sizeof(float) * NI * NK);
    cudaMemcpy(A_gpu, A, sizeof(float) * NI * NK, cudaMemcpyHostToDevice);
    float *B_gpu;
    cudaMalloc((void **)&B_gpu, sizeof(float) * NK * NJ);
    cudaMemcpy(B_gpu, B, sizeof(float) * NK * NJ, cudaMemcpyHostToDevice);
    float *C_gpu;
    cudaMalloc((void **)&C_gpu, sizeof(float) * NI * NJ);
    cudaMemcpy(C_gpu, C, sizeof(float) * NI * NJ, cudaMemcpyHostToDevice);
    dim3 block(16, 16);
    dim3 grid(NJ / 16, NI / 16);
    gemm_kernel<<<grid, block>>>(alpha, beta, A_gpu, B_gpu, C_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(C, C_gpu, sizeof(float) * NI * NJ, cudaMemcpyDeviceToHost);
    cudaFree(A_gpu);
    cudaFree(B_gpu);
    cudaFree(C_gpu);
}
