"""Walk one snippet through every pipeline stage, printing as it goes.

Run from the repository root:  python3 demos/walkthrough.py
"""

from cudacl.cli import load_usage_tree
from cudacl.lexer import default_lexicon
from cudacl.postproc import render_translated_unit
from cudacl.renaming import preprocess_unit
from cudacl.translate import RuleBasedBackend, translate_unit

SOURCE = """\
#define N 1024

__global__ void add_one(float *data)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    data[i] = data[i] + 1.0f;
}

void add_one_host(float* data)
{
    float *data_gpu;
    cudaMalloc((void **)&data_gpu, sizeof(float) * N);
    cudaMemcpy(data_gpu, data, sizeof(float) * N, cudaMemcpyHostToDevice);
    dim3 block(256, 1);
    dim3 grid(N / 256, 1);
    add_one<<<grid, block>>>(data_gpu);
    cudaDeviceSynchronize();
    cudaMemcpy(data, data_gpu, sizeof(float) * N, cudaMemcpyDeviceToHost);
    cudaFree(data_gpu);
}
"""


def banner(title):
    print(f"\n--- {title} " + "-" * (60 - len(title)))


def main():
    lexicon = default_lexicon()
    tree = load_usage_tree(None)

    banner("input")
    print(SOURCE, end="")

    unit = preprocess_unit(SOURCE, lexicon, "walkthrough.cu")

    banner("renamed sentences")
    print(unit.render_sentences(), end="")

    banner("symbol maps (first translatable sentence)")
    for sent in unit.sentences:
        if sent.translatable:
            print("ids:", sent.map.id_names)
            print("ops:", sent.map.op_names)
            print("tps:", sent.map.tp_names)
            break

    tu = translate_unit(unit, tree, RuleBasedBackend(tree, lexicon))
    host, kernel = render_translated_unit(tu)

    banner("host output (.c)")
    print(host, end="")
    banner("kernel output (.cl)")
    print(kernel, end="")

    if tu.uncovered:
        banner("uncovered")
        for unc in tu.uncovered:
            print(f"{unc.source_name}:{unc.line}: {unc.text}")


if __name__ == "__main__":
    main()
