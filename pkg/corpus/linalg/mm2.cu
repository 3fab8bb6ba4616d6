#include <stdio.h>
#define NI 512
#define NJ 512
#define NK 512

__global__ void mm2_kernel1(float *A, float *B, float *C)
{
    int j = blockIdx.x * blockDim.x + threadIdx.x;
    int i = blockIdx.y * blockDim.y + threadIdx.y;
    if ((j < NJ) && (i < NI)) {
        int k;
        for (k = 0; k < NK; k++) {
            C[i * NJ + j] += A[i * NK + k] * B[k * NJ + j];
        }
    }
}

void mm2_cuda(float* A, float* B, float* C)
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
    dim3 block(32, 8);
    dim3 grid(NJ / 32, NI / 8);
    mm2_kernel1<<<grid, block>>>(A_gpu, B_gpu, C_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(C, C_gpu, sizeof(float) * NI * NJ, cudaMemcpyDeviceToHost);
    cudaFree(A_gpu);
    cudaFree(B_gpu);
    cudaFree(C_gpu);
}
