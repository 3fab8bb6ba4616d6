#define N 2048

__global__ void mvt_kernel1(float *A, float *x1, float *y1)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if (i < N) {
        int j;
        for (j = 0; j < N; j++) {
            x1[i] += A[i * N + j] * y1[j];
        }
    }
}

__global__ void mvt_kernel2(float *A, float *x2, float *y2)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if (i < N) {
        int j;
        for (j = 0; j < N; j++) {
            x2[i] += A[j * N + i] * y2[j];
        }
    }
}

void mvt_cuda(float* A, float* x1, float* x2, float* y1, float* y2)
{
    float *A_gpu;
    cudaMalloc((void **)&A_gpu, sizeof(float) * N * N);
    cudaMemcpy(A_gpu, A, sizeof(float) * N * N, cudaMemcpyHostToDevice);
    float *x1_gpu;
    cudaMalloc((void **)&x1_gpu, sizeof(float) * N);
    cudaMemcpy(x1_gpu, x1, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *x2_gpu;
    cudaMalloc((void **)&x2_gpu, sizeof(float) * N);
    cudaMemcpy(x2_gpu, x2, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *y1_gpu;
    cudaMalloc((void **)&y1_gpu, sizeof(float) * N);
    cudaMemcpy(y1_gpu, y1, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *y2_gpu;
    cudaMalloc((void **)&y2_gpu, sizeof(float) * N);
    cudaMemcpy(y2_gpu, y2, sizeof(float) * N, cudaMemcpyHostToDevice);
    dim3 block(256, 1);
    dim3 grid(N / 256, 1);
    mvt_kernel1<<<grid, block>>>(A_gpu, x1_gpu, y1_gpu);
    mvt_kernel2<<<grid, block>>>(A_gpu, x2_gpu, y2_gpu);
    cudaThreadSynchronize();
    cudaMemcpy(x1, x1_gpu, sizeof(float) * N, cudaMemcpyDeviceToHost);
    cudaMemcpy(x2, x2_gpu, sizeof(float) * N, cudaMemcpyDeviceToHost);
    cudaFree(A_gpu);
    cudaFree(x1_gpu);
    cudaFree(x2_gpu);
    cudaFree(y1_gpu);
    cudaFree(y2_gpu);
}
