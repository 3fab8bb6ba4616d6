#define NX 1024
#define NY 1024

__global__ void atax_kernel1(float *A, float *x, float *tmp)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    if (i < NX) {
        int j;
        tmp[i] = 0.0f;
        for (j = 0; j < NY; j++) {
            tmp[i] += A[i * NY + j] * x[j];
        }
    }
}

__global__ void atax_kernel2(float *A, float *y, float *tmp)
{
    int j = blockIdx.x * blockDim.x + threadIdx.x;
    if (j < NY) {
        int i;
        for (i = 0; i < NX; i++) {
            y[j] += A[i * NY + j] * tmp[i];
        }
    }
}

void atax_cuda(float* A, float* x, float* y)
{
    float *A_gpu;
    cudaMalloc((void **)&A_gpu, sizeof(float) * NX * NY);
    cudaMemcpy(A_gpu, A, sizeof(float) * NX * NY, cudaMemcpyHostToDevice);
    float *x_gpu;
    cudaMalloc((void **)&x_gpu, sizeof(float) * NY);
    cudaMemcpy(x_gpu, x, sizeof(float) * NY, cudaMemcpyHostToDevice);
    float *y_gpu;
    cudaMalloc((void **)&y_gpu, sizeof(float) * NY);
    cudaMemset(y_gpu, 0, sizeof(float) * NY);
    float *tmp_gpu;
    cudaMalloc((void **)&tmp_gpu, sizeof(float) * NX);
    dim3 block(256, 1);
    dim3 grid1(NX / 256, 1);
    dim3 grid2(NY / 256, 1);
    atax_kernel1<<<grid1, block>>>(A_gpu, x_gpu, tmp_gpu);
    cudaDeviceSynchronize();
    atax_kernel2<<<grid2, block>>>(A_gpu, y_gpu, tmp_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(y, y_gpu, sizeof(float) * NY, cudaMemcpyDeviceToHost);
    cudaFree(A_gpu);
    cudaFree(x_gpu);
    cudaFree(y_gpu);
    cudaFree(tmp_gpu);
}
