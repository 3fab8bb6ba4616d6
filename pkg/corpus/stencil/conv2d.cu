#define NI 4096
#define NJ 4096

__global__ void Convolution2D_kernel(float *A, float *B)
{
    int j = blockIdx.x * blockDim.x + threadIdx.x;
    int i = blockIdx.y * blockDim.y + threadIdx.y;
    float c11 = 0.2f;
    float c12 = -0.3f;
    float c13 = 0.4f;
    float c21 = 0.5f;
    float c22 = 0.6f;
    float c23 = 0.7f;
    float c31 = -0.8f;
    float c32 = -0.9f;
    float c33 = 0.1f;
    if ((i < NI - 1) && (j < NJ - 1) && (i > 0) && (j > 0)) {
        B[i * NJ + j] = c11 * A[(i - 1) * NJ + (j - 1)] + c12 * A[(i + 0) * NJ + (j - 1)] + c13 * A[(i + 1) * NJ + (j - 1)]
            + c21 * A[(i - 1) * NJ + (j + 0)] + c22 * A[(i + 0) * NJ + (j + 0)] + c23 * A[(i + 1) * NJ + (j + 0)]
            + c31 * A[(i - 1) * NJ + (j + 1)] + c32 * A[(i + 0) * NJ + (j + 1)] + c33 * A[(i + 1) * NJ + (j + 1)];
    }
}

void conv2d_cuda(float* A, float* B)
{
    float *A_gpu;
    cudaMalloc((void **)&A_gpu, sizeof(float) * NI * NJ);
    cudaMemcpy(A_gpu, A, sizeof(float) * NI * NJ, cudaMemcpyHostToDevice);
    float *B_gpu;
    cudaMalloc((void **)&B_gpu, sizeof(float) * NI * NJ);
    dim3 block(32, 8);
    dim3 grid(NI / 32, NJ / 8);
    Convolution2D_kernel<<<grid, block>>>(A_gpu, B_gpu);
    cudaThreadSynchronize();
    cudaMemcpy(B, B_gpu, sizeof(float) * NI * NJ, cudaMemcpyDeviceToHost);
    cudaFree(A_gpu);
    cudaFree(B_gpu);
}
