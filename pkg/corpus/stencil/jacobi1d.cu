#define N 16384
#define TSTEPS 100

__global__ void jacobi1d_kernel(float *A, float *B)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if ((i > 0) && (i < N - 1)) {
        B[i] = 0.33333f * (A[i - 1] + A[i] + A[i + 1]);
    }
}

__global__ void copy_kernel(float *A, float *B)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if ((i > 0) && (i < N - 1)) {
        A[i] = B[i];
    }
}

void jacobi1d_cuda(float* A, float* B)
{
    float *A_gpu;
    cudaMalloc((void **)&A_gpu, sizeof(float) * N);
    cudaMemcpy(A_gpu, A, sizeof(float) * N, cudaMemcpyHostToDevice);
    float *B_gpu;
    cudaMalloc((void **)&B_gpu, sizeof(float) * N);
    cudaMemcpy(B_gpu, B, sizeof(float) * N, cudaMemcpyHostToDevice);
    dim3 block(256, 1);
    dim3 grid(N / 256, 1);
    int t;
    for (t = 0; t < TSTEPS; t++) {
        jacobi1d_kernel<<<grid, block>>>(A_gpu, B_gpu);
        cudaThreadSynchronize();
        copy_kernel<<<grid, block>>>(A_gpu, B_gpu);
        cudaThreadSynchronize();
    }
    cudaMemcpy(A, A_gpu, sizeof(float) * N, cudaMemcpyDeviceToHost);
    cudaFree(A_gpu);
    cudaFree(B_gpu);
}
