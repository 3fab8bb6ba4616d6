#include <stdio.h>
#define NI 512
#define NJ 512
#define NK 512
void mm2_cuda (float * A , float * B , float * C) {
    cl_mem A_gpu;
    A_gpu = clCreateBuffer (context , CL_MEM_READ_WRITE , sizeof (float) * NI * NK , NULL , NULL);
    clEnqueueWriteBuffer (command_queue , A_gpu , CL_TRUE , 0 , sizeof (float) * NI * NK , A , 0 , NULL , NULL);
    cl_mem B_gpu;
    B_gpu = clCreateBuffer (context , CL_MEM_READ_WRITE , sizeof (float) * NK * NJ , NULL , NULL);
    clEnqueueWriteBuffer (command_queue , B_gpu , CL_TRUE , 0 , sizeof (float) * NK * NJ , B , 0 , NULL , NULL);
    cl_mem C_gpu;
    C_gpu = clCreateBuffer (context , CL_MEM_READ_WRITE , sizeof (float) * NI * NJ , NULL , NULL);
    clEnqueueWriteBuffer (command_queue , C_gpu , CL_TRUE , 0 , sizeof (float) * NI * NJ , C , 0 , NULL , NULL);
    dim3 block (32 , 8);
    dim3 grid (NJ / 32 , NI / 8);
    _clSetKernelArg ("mm2_kernel1" , 0 , A_gpu);
    _clSetKernelArg ("mm2_kernel1" , 1 , B_gpu);
    _clSetKernelArg ("mm2_kernel1" , 2 , C_gpu);
    _clEnqueueNDRangeKernel (grid , block , "mm2_kernel1");
    clFinish (command_queue);
    clEnqueueReadBuffer (command_queue , C_gpu , CL_TRUE , 0 , sizeof (float) * NI * NJ , C , 0 , NULL , NULL);
    clReleaseMemObject (A_gpu);
    clReleaseMemObject (B_gpu);
    clReleaseMemObject (C_gpu);
}
