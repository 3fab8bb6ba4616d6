"""End-to-end checks for the cudacl command line: outputs, layouts, exit codes."""

from pathlib import Path

import pytest

from cudacl.cli import main
from cudacl.renaming import parse_maps

REPO = Path(__file__).resolve().parents[1]
CORPUS = REPO / "corpus"
GOLDEN = Path(__file__).resolve().parent / "data"

SMALL_CU = """\
#define N 256

__global__ void twice_kernel(float *data)
{
    int i = blockIdx.x * blockDim.x + threadIdx.x;
    data[i] = data[i] + data[i];
}

void twice(float* data)
{
    float *data_gpu;
    cudaMalloc((void **)&data_gpu, sizeof(float) * N);
    cudaMemcpy(data_gpu, data, sizeof(float) * N, cudaMemcpyHostToDevice);
    dim3 block(64, 1);
    dim3 grid(N / 64, 1);
    twice_kernel<<<grid, block>>>(data_gpu);
    cudaMemcpy(data, data_gpu, sizeof(float) * N, cudaMemcpyDeviceToHost);
    cudaFree(data_gpu);
}
"""


def write_small(tmp_path):
    src = tmp_path / "small.cu"
    src.write_text(SMALL_CU, encoding="utf-8")
    return src


# -- preprocess ----------------------------------------------------------------


def test_preprocess_writes_sentence_map_passthrough(tmp_path):
    src = write_small(tmp_path)
    out = tmp_path / "pre"
    assert main(["preprocess", str(src), "-o", str(out), "--quiet"]) == 0
    sentences = (out / "small.sentences").read_text(encoding="utf-8")
    maps = (out / "small.map").read_text(encoding="utf-8")
    passthrough = (out / "small.passthrough").read_text(encoding="utf-8")

    lines = sentences.splitlines()
    assert "cudaMalloc ( ( _tp0 _op0 ) _op1 _id0 , sizeof ( _tp1 ) _op2 _id1 ) ;" in lines
    assert "_line_not_to_translate" in lines  # dim3 declarations stay untranslated
    # one serialized map row per sentence
    assert len(parse_maps(maps)) == len(lines)
    # the #define went to the passthrough channel with its position
    assert passthrough.startswith("1\t1\t#define N 256")


def test_preprocess_accepts_directories(tmp_path):
    out = tmp_path / "pre"
    assert main(["preprocess", str(CORPUS / "misc"), "-o", str(out), "--quiet"]) == 0
    stems = {p.stem for p in out.glob("*.sentences")}
    assert stems == {"vecadd", "saxpy", "dotprod", "reverse", "scale"}
    assert len(list(out.iterdir())) == 15  # three files per source


# -- translate -----------------------------------------------------------------


def test_translate_matches_golden_output(tmp_path):
    out = tmp_path / "tr"
    rc = main(["translate", str(CORPUS / "linalg" / "mm2.cu"), "-o", str(out), "--quiet"])
    assert rc == 0
    host = (out / "mm2_host.c").read_text(encoding="utf-8")
    kernel = (out / "mm2_kernel.cl").read_text(encoding="utf-8")
    assert host == (GOLDEN / "mm2_host.golden.c").read_text(encoding="utf-8")
    assert kernel == (GOLDEN / "mm2_kernel.golden.cl").read_text(encoding="utf-8")


def test_translate_accepts_usage_file_pair(tmp_path):
    cuda = tmp_path / "u.cuda"
    opencl = tmp_path / "u.opencl"
    cuda.write_text(
        "cudaFree ( _expr0 ) ;\ncudaDeviceSynchronize ( ) ;\n", encoding="utf-8"
    )
    opencl.write_text(
        "clReleaseMemObject ( _expr0 ) ;\nclFinish ( command_queue ) ;\n", encoding="utf-8"
    )
    src = tmp_path / "free.cu"
    src.write_text("void f(float* p)\n{\n    cudaFree(p);\n}\n", encoding="utf-8")
    out = tmp_path / "tr"
    rc = main(
        ["translate", str(src), "--usages", str(cuda), str(opencl), "-o", str(out), "--quiet"]
    )
    assert rc == 0
    assert "clReleaseMemObject (p);" in (out / "free_host.c").read_text(encoding="utf-8")


def test_translate_reports_uncovered_on_stderr(tmp_path, capsys):
    src = tmp_path / "odd.cu"
    src.write_text("void f()\n{\n    cudaSetDevice(0);\n}\n", encoding="utf-8")
    out = tmp_path / "tr"
    assert main(["translate", str(src), "-o", str(out), "--quiet"]) == 0
    err = capsys.readouterr().err
    assert "uncovered:" in err and "cudaSetDevice" in err
    # uncovered sentences still pass through to the host file untranslated
    assert "cudaSetDevice" in (out / "odd_host.c").read_text(encoding="utf-8")


def test_translate_identity_backend_echoes_source(tmp_path):
    out = tmp_path / "tr"
    rc = main(
        [
            "translate",
            str(CORPUS / "linalg" / "mm2.cu"),
            "-o",
            str(out),
            "--backend",
            "identity",
            "--quiet",
        ]
    )
    assert rc == 0
    host = (out / "mm2_host.c").read_text(encoding="utf-8")
    kernel = (out / "mm2_kernel.cl").read_text(encoding="utf-8")
    assert "cudaMalloc ((void **) & A_gpu , sizeof (float) * NI * NK);" in host
    assert "int j = blockIdx.x * blockDim.x + threadIdx.x;" in kernel
    assert "__global__" in kernel


def test_translate_external_backend_equals_identity(tmp_path):
    passthrough = tmp_path / "copy_lines.py"
    passthrough.write_text(
        "import sys\n"
        "from pathlib import Path\n"
        "Path(sys.argv[2]).write_text(Path(sys.argv[1]).read_text())\n",
        encoding="utf-8",
    )
    out_ext = tmp_path / "ext"
    out_idn = tmp_path / "idn"
    src = str(CORPUS / "linalg" / "mm2.cu")
    assert main(["translate", src, "-o", str(out_idn), "--backend", "identity", "--quiet"]) == 0
    rc = main(
        [
            "translate",
            src,
            "-o",
            str(out_ext),
            "--backend",
            f"extern:python3 {passthrough}",
            "--quiet",
        ]
    )
    assert rc == 0
    for name in ("mm2_host.c", "mm2_kernel.cl"):
        assert (out_ext / name).read_text(encoding="utf-8") == (out_idn / name).read_text(
            encoding="utf-8"
        )


def test_translate_parallel_jobs_match_serial(tmp_path):
    out1 = tmp_path / "serial"
    out4 = tmp_path / "parallel"
    assert main(["translate", str(CORPUS), "-o", str(out1), "--quiet"]) == 0
    assert main(["translate", str(CORPUS), "-o", str(out4), "--jobs", "4", "--quiet"]) == 0
    names = sorted(p.name for p in out1.iterdir())
    assert names == sorted(p.name for p in out4.iterdir())
    for name in names:
        assert (out1 / name).read_bytes() == (out4 / name).read_bytes()


# -- gen-dataset ---------------------------------------------------------------


def read_lines(path):
    return path.read_text(encoding="utf-8").splitlines()


def test_gen_dataset_writes_training_directory(tmp_path, capsys):
    out = tmp_path / "ds"
    assert main(["gen-dataset", "--corpus", str(CORPUS), "-o", str(out), "--quiet"]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == [
        "dev.cuda",
        "dev.opencl",
        "stats.tsv",
        "test.cuda",
        "test.opencl",
        "train.cuda",
        "train.opencl",
        "uncovered.txt",
        "vocab.cuda",
        "vocab.opencl",
    ]
    src_lines = read_lines(out / "train.cuda")
    tgt_lines = read_lines(out / "train.opencl")
    assert len(src_lines) == len(tgt_lines) > 0
    assert all(src_lines) and all(tgt_lines)
    # shared split: dev and test are copies of train
    assert read_lines(out / "dev.cuda") == src_lines
    assert read_lines(out / "test.opencl") == tgt_lines
    # a clean corpus leaves the uncovered report empty
    assert (out / "uncovered.txt").read_text(encoding="utf-8") == ""
    stdout = capsys.readouterr().out
    assert "Benchmark" in stdout and "Total" in stdout
    assert f"wrote {len(src_lines)} pairs" in stdout


def test_gen_dataset_vocab_files(tmp_path):
    out = tmp_path / "ds"
    assert main(["gen-dataset", str(CORPUS), "-o", str(out), "--quiet"]) == 0
    for side in ("cuda", "opencl"):
        vocab = read_lines(out / f"vocab.{side}")
        assert vocab == sorted(set(vocab))
        assert "_line_not_to_translate" in vocab
        assert not any(sym.startswith("_expr") for sym in vocab)
    assert "cudaMemcpyHostToDevice" in read_lines(out / "vocab.cuda")
    assert "clEnqueueWriteBuffer" in read_lines(out / "vocab.opencl")


def test_gen_dataset_stats_tsv_schema(tmp_path):
    out = tmp_path / "ds"
    assert main(["gen-dataset", str(CORPUS), "-o", str(out), "--quiet"]) == 0
    rows = [line.split("\t") for line in read_lines(out / "stats.tsv")]
    assert rows[0] == ["Benchmark", "# application", "# sentences found", "# sentences generated"]
    assert [r[0] for r in rows[1:]] == ["linalg", "misc", "stencil", "Total"]
    for _, n_files, found, generated in rows[1:]:
        assert int(generated) >= int(found) >= 0
        assert int(n_files) > 0


def test_gen_dataset_disjoint_split(tmp_path):
    out = tmp_path / "ds"
    rc = main(["gen-dataset", str(CORPUS), "-o", str(out), "--split", "disjoint", "--quiet"])
    assert rc == 0
    train = read_lines(out / "train.cuda")
    dev = read_lines(out / "dev.cuda")
    test = read_lines(out / "test.cuda")
    n = len(train) + len(dev) + len(test)
    assert len(dev) == len(test) == n // 10
    assert not (set(train) & set(dev) & set(test)) or n < 10
    # slices are contiguous in emission order
    shared = tmp_path / "all"
    assert main(["gen-dataset", str(CORPUS), "-o", str(shared), "--quiet"]) == 0
    assert train + dev + test == read_lines(shared / "train.cuda")


def test_gen_dataset_no_permute_emits_only_found(tmp_path):
    out = tmp_path / "obs"
    rc = main(["gen-dataset", str(CORPUS), "-o", str(out), "--no-permute", "--quiet"])
    assert rc == 0
    rows = [line.split("\t") for line in read_lines(out / "stats.tsv")][1:]
    assert rows, "stats table missing"
    for _, _, found, generated in rows:
        assert generated == found


def test_gen_dataset_permutation_grows_dataset(tmp_path):
    out = tmp_path / "perm"
    assert main(["gen-dataset", str(CORPUS), "-o", str(out), "--quiet"]) == 0
    rows = {
        name: (int(found), int(gen))
        for name, _, found, gen in (line.split("\t") for line in read_lines(out / "stats.tsv")[1:])
    }
    assert all(gen >= found for found, gen in rows.values())
    found, gen = rows["misc"]  # chunked copies give memcpy two varying slots
    assert gen > found


def test_gen_dataset_empty_corpus_succeeds(tmp_path, capsys):
    empty = tmp_path / "nothing"
    empty.mkdir()
    out = tmp_path / "ds"
    assert main(["gen-dataset", str(empty), "-o", str(out), "--quiet"]) == 0
    assert read_lines(out / "stats.tsv") == [
        "Benchmark\t# application\t# sentences found\t# sentences generated",
        "Total\t0\t0\t0",
    ]
    assert (out / "train.cuda").read_text(encoding="utf-8") == ""
    assert "wrote 0 pairs" in capsys.readouterr().out


# -- stats ---------------------------------------------------------------------


def test_stats_reports_clean_corpus(capsys):
    assert main(["stats", str(CORPUS), "--show-uncovered", "--quiet"]) == 0
    stdout = capsys.readouterr().out
    assert "no uncovered sentences" in stdout
    lines = [line.split() for line in stdout.splitlines() if line and line[0].isalpha()]
    names = [parts[0] for parts in lines if parts[1:] and parts[1].isdigit()]
    assert names == ["linalg", "misc", "stencil", "Total"]


def test_stats_reads_generated_dataset_dir(tmp_path, capsys):
    out = tmp_path / "ds"
    assert main(["gen-dataset", str(CORPUS), "-o", str(out), "--quiet"]) == 0
    table_from_gen = capsys.readouterr().out.splitlines()
    assert main(["stats", str(out)]) == 0
    table_from_dir = capsys.readouterr().out.splitlines()
    # same rows as the table printed at generation time
    assert table_from_dir == table_from_gen[: len(table_from_dir)]


def test_stats_lists_uncovered_sentences(tmp_path, capsys):
    src = tmp_path / "seed.cu"
    src.write_text("void f()\n{\n    cudaGetLastError();\n}\n", encoding="utf-8")
    assert main(["stats", str(src), "--show-uncovered", "--quiet"]) == 0
    stdout = capsys.readouterr().out
    assert "uncovered: " in stdout and "cudaGetLastError ( ) ;" in stdout


# -- exit codes ----------------------------------------------------------------


def test_exit_zero_on_help():
    assert main(["--help"]) == 0


def test_exit_one_on_usage_errors():
    assert main([]) == 1
    assert main(["translate"]) == 1  # missing sources and -o
    assert main(["no-such-command", "x"]) == 1
    assert main(["gen-dataset", "--split", "sideways", "-o", "x"]) == 1


def test_exit_two_on_malformed_source(tmp_path):
    src = tmp_path / "broken.cu"
    src.write_text("void f() {\n", encoding="utf-8")
    assert main(["translate", str(src), "-o", str(tmp_path / "tr")]) == 2


def test_exit_two_on_malformed_usage_files(tmp_path):
    cuda = tmp_path / "u.cuda"
    opencl = tmp_path / "u.opencl"
    cuda.write_text("cudaFree ( _expr0 ) ;\ncudaDeviceSynchronize ( ) ;\n", encoding="utf-8")
    opencl.write_text("clReleaseMemObject ( _expr0 ) ;\n", encoding="utf-8")
    src = write_small(tmp_path)
    rc = main(
        [
            "translate",
            str(src),
            "--usages",
            str(cuda),
            str(opencl),
            "-o",
            str(tmp_path / "tr"),
        ]
    )
    assert rc == 2


def test_exit_three_on_backend_protocol_failure(tmp_path):
    src = write_small(tmp_path)
    out = tmp_path / "tr"
    # command fails outright
    assert main(["translate", str(src), "-o", str(out), "--backend", "extern:false"]) == 3
    # command succeeds but never writes the output file
    assert main(["translate", str(src), "-o", str(out), "--backend", "extern:true"]) == 3


def test_exit_four_on_io_errors(tmp_path):
    out = tmp_path / "tr"
    # no readable inputs at the given path
    assert main(["translate", str(tmp_path / "nope"), "-o", str(out)]) == 4
    # lexicon file missing
    src = write_small(tmp_path)
    rc = main(["translate", str(src), "-o", str(out), "--lexicon", "/no/such.lexicon"])
    assert rc == 4


def test_exit_five_on_internal_error(tmp_path, monkeypatch, capsys):
    import cudacl.cli as cli_mod

    def boom(*args, **kwargs):
        raise RuntimeError("internal")

    monkeypatch.setattr(cli_mod, "render_stats_table", boom)
    assert main(["stats", str(CORPUS / "misc"), "--quiet"]) == 5
    assert "RuntimeError" in capsys.readouterr().err
