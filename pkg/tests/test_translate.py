"""Translation and rendering tests.

Expected outputs are hand-derived: target patterns instantiated on paper,
symbol restoration applied with the per-sentence maps, layout rules applied
by hand.  End-to-end comparisons are made at token level where layout is not
the point, and as exact text for the frozen formatting examples.
"""

import stat

import pytest

from cudacl.errors import BackendProtocolError, DanglingSymbol, UnboundCapture
from cudacl.lexer import default_lexicon, tokenize
from cudacl.postproc import format_source, format_tokens, render_translated_unit, restore_symbols
from cudacl.renaming import SymbolMap, preprocess_unit
from cudacl.translate import (
    ExternalBackend,
    IdentityBackend,
    PieceKind,
    RequestKind,
    RuleBasedBackend,
    TranslationRequest,
    expand_kernel_launch,
    instantiate_target,
    launch_shape,
    make_backend,
    translate_kernel_tokens,
    translate_unit,
)
from cudacl.usage import UsageTree, parse_usage_pairs

LEX = default_lexicon()

USAGE_TEXT = """\
_tp0 _op0 _id0 ; _br cudaMalloc ( ( _tp0 _op0 ) _op1 _id0 , _expr0 ) ;
cl_mem _id0 ; _br _id0 = clCreateBuffer ( context , CL_MEM_READ_WRITE , _expr0 , NULL , NULL ) ;

cudaMalloc ( ( _tp0 _op0 ) _op1 _id0 , _expr0 ) ;
_id0 = clCreateBuffer ( context , CL_MEM_READ_WRITE , _expr0 , NULL , NULL ) ;

cudaMemcpy ( _expr0 , _expr1 , _expr2 , cudaMemcpyHostToDevice ) ;
clEnqueueWriteBuffer ( command_queue , _expr0 , CL_TRUE , 0 , _expr2 , _expr1 , 0 , NULL , NULL ) ;

cudaMemcpy ( _expr0 , _expr1 , _expr2 , cudaMemcpyDeviceToHost ) ;
clEnqueueReadBuffer ( command_queue , _expr1 , CL_TRUE , 0 , _expr2 , _expr0 , 0 , NULL , NULL ) ;

cudaFree ( _expr0 ) ;
clReleaseMemObject ( _expr0 ) ;
"""

HOST_SNIPPET = """\
void mm2_cuda(float* A, float* B)
{
float *A_gpu;
cudaMalloc((void **)&A_gpu, sizeof(float) * NI * NK);
cudaMemcpy(A_gpu, A, sizeof(float) * NI * NK, cudaMemcpyHostToDevice);
}
"""

KERNEL_SNIPPET = """\
__global__ void mm2_kernel1(float *A, float *B, float *C)
{
int j = blockIdx.x * blockDim.x + threadIdx.x;
}
"""


def make_tree():
    return UsageTree(parse_usage_pairs(USAGE_TEXT))


def rule_translate(source):
    tree = make_tree()
    unit = preprocess_unit(source, LEX)
    return translate_unit(unit, tree, RuleBasedBackend(tree, LEX))


def token_texts(source):
    tokens, _ = tokenize(source, LEX)
    return [t.text for t in tokens]


class TestInstantiateTarget:
    def test_splices_captures(self):
        target = tuple("clReleaseMemObject ( _expr0 ) ;".split())
        out = instantiate_target(target, {0: ("_id0",)})
        assert out == ("clReleaseMemObject", "(", "_id0", ")", ";")

    def test_multi_token_capture(self):
        target = tuple("f ( _expr0 ) ;".split())
        cap = tuple("sizeof ( _tp0 ) _op0 _id0".split())
        assert instantiate_target(target, {0: cap}) == ("f", "(", *cap, ")", ";")

    def test_unbound_capture(self):
        with pytest.raises(UnboundCapture):
            instantiate_target(("f", "(", "_expr1", ")"), {0: ("_id0",)})


class TestLaunchShape:
    def test_two_part_launch(self):
        syms = tuple("k <<< _id0 , _id1 >>> ( _id2 , _id3 ) ;".split())
        name, cfg, args = launch_shape(syms)
        assert name == "k"
        assert cfg == [("_id0",), ("_id1",)]
        assert args == [("_id2",), ("_id3",)]

    def test_expression_config(self):
        syms = tuple("k <<< dim3 ( _id0 , _id1 ) , _id2 >>> ( _id3 ) ;".split())
        name, cfg, args = launch_shape(syms)
        assert cfg == [tuple("dim3 ( _id0 , _id1 )".split()), ("_id2",)]

    def test_three_part_config_rejected(self):
        syms = tuple("k <<< _id0 , _id1 , _id2 >>> ( _id3 ) ;".split())
        assert launch_shape(syms) is None

    def test_one_part_config_rejected(self):
        syms = tuple("k <<< _id0 >>> ( _id1 ) ;".split())
        assert launch_shape(syms) is None

    def test_zero_arg_launch(self):
        syms = tuple("k <<< _id0 , _id1 >>> ( ) ;".split())
        name, cfg, args = launch_shape(syms)
        assert args == []


class TestLaunchExpansion:
    def test_two_arg_launch_expands_to_three_statements(self):
        syms = tuple("Convolution2D_kernel <<< _id0 , _id1 >>> ( _id2 , _id3 ) ;".split())
        out = " ".join(expand_kernel_launch(syms))
        assert out == (
            '_clSetKernelArg ( "Convolution2D_kernel" , 0 , _id2 ) ; _br '
            '_clSetKernelArg ( "Convolution2D_kernel" , 1 , _id3 ) ; _br '
            '_clEnqueueNDRangeKernel ( _id0 , _id1 , "Convolution2D_kernel" ) ;'
        )

    def test_malformed_launch_raises(self):
        with pytest.raises(UnboundCapture):
            expand_kernel_launch(tuple("k <<< _id0 , _id1 , _id2 >>> ( ) ;".split()))


class TestKernelTokens:
    def test_signature_gains_global_qualifiers(self):
        unit = preprocess_unit(KERNEL_SNIPPET, LEX)
        sig = unit.sentences[0]
        out = translate_kernel_tokens(sig.symbols, LEX, sig.map)
        assert " ".join(out) == (
            "__kernel _tp0 _id0 ( __global _tp1 _op0 _id1 , "
            "__global _tp1 _op0 _id2 , __global _tp1 _op0 _id3 )"
        )

    def test_value_params_not_qualified(self):
        src = "__global__ void k(float *a, int n)\n{\n}\n"
        unit = preprocess_unit(src, LEX)
        sig = unit.sentences[0]
        out = translate_kernel_tokens(sig.symbols, LEX, sig.map)
        assert " ".join(out) == "__kernel _tp0 _id0 ( __global _tp1 _op0 _id1 , _tp2 _id2 )"

    def test_builtin_substitution(self):
        syms = tuple("_tp0 _id0 _op0 blockIdx.x _op1 blockDim.x _op2 threadIdx.x ;".split())
        out = translate_kernel_tokens(syms, LEX)
        assert " ".join(out) == (
            "_tp0 _id0 _op0 get_group_id ( 0 ) _op1 get_local_size ( 0 ) _op2 get_local_id ( 0 ) ;"
        )

    def test_syncthreads_sequence(self):
        syms = tuple("__syncthreads ( ) ;".split())
        assert " ".join(translate_kernel_tokens(syms, LEX)) == "barrier ( CLK_LOCAL_MEM_FENCE ) ;"

    def test_shared_qualifier(self):
        syms = tuple("__shared__ _tp0 _id0 [ _id1 ] ;".split())
        assert " ".join(translate_kernel_tokens(syms, LEX)) == "__local _tp0 _id0 [ _id1 ] ;"

    def test_empty_value_deletes_token(self):
        syms = tuple("__device__ _tp0 _id0 ( _tp1 _id1 )".split())
        assert " ".join(translate_kernel_tokens(syms, LEX)) == "_tp0 _id0 ( _tp1 _id1 )"


class TestUnitTranslation:
    def test_host_unit_pieces(self):
        tu = rule_translate(HOST_SNIPPET)
        kinds = [p.kind for p in tu.pieces]
        assert kinds == [
            PieceKind.VERBATIM,  # signature
            PieceKind.VERBATIM,  # {
            PieceKind.TRANSLATED,  # decl+malloc group
            PieceKind.TRANSLATED,  # memcpy
            PieceKind.VERBATIM,  # }
        ]
        group = tu.pieces[2]
        assert len(group.origins) == 2
        assert len(group.segments) == 2
        assert tu.uncovered == []

    def test_group_restores_per_segment(self):
        tu = rule_translate(HOST_SNIPPET)
        group = tu.pieces[2]
        seg_texts = [" ".join(restore_symbols(seg, m)) for seg, m in group.segments]
        assert seg_texts[0] == "cl_mem A_gpu ;"
        assert seg_texts[1] == (
            "A_gpu = clCreateBuffer ( context , CL_MEM_READ_WRITE , "
            "sizeof ( float ) * NI * NK , NULL , NULL ) ;"
        )

    def test_memcpy_restored(self):
        tu = rule_translate(HOST_SNIPPET)
        seg, smap = tu.pieces[3].segments[0]
        assert " ".join(restore_symbols(seg, smap)) == (
            "clEnqueueWriteBuffer ( command_queue , A_gpu , CL_TRUE , 0 , "
            "sizeof ( float ) * NI * NK , A , 0 , NULL , NULL ) ;"
        )

    def test_uncovered_sentence_kept_verbatim(self):
        tu = rule_translate("void f()\n{\ncudaSetDevice(0);\n}\n")
        kinds = [p.kind for p in tu.pieces]
        assert kinds == [PieceKind.VERBATIM, PieceKind.VERBATIM, PieceKind.UNCOVERED, PieceKind.VERBATIM]
        (unc,) = tu.uncovered
        assert unc.text == "cudaSetDevice ( 0 ) ;"
        assert unc.line == 3
        assert unc.renamed == "cudaSetDevice ( _id0 ) ;"

    def test_free_and_launch(self):
        src = "void stop()\n{\nConvolution2D_kernel<<<grid, block>>>(A_gpu, B_gpu);\ncudaFree(A_gpu);\n}\n"
        tu = rule_translate(src)
        launch = tu.pieces[2]
        assert [" ".join(restore_symbols(s, m)) for s, m in launch.segments] == [
            '_clSetKernelArg ( "Convolution2D_kernel" , 0 , A_gpu ) ;',
            '_clSetKernelArg ( "Convolution2D_kernel" , 1 , B_gpu ) ;',
            '_clEnqueueNDRangeKernel ( grid , block , "Convolution2D_kernel" ) ;',
        ]
        free = tu.pieces[3]
        assert [" ".join(restore_symbols(s, m)) for s, m in free.segments] == [
            "clReleaseMemObject ( A_gpu ) ;"
        ]

    def test_three_part_launch_is_uncovered(self):
        tu = rule_translate("void f()\n{\nk<<<g, b, smem>>>(x);\n}\n")
        assert [p.kind for p in tu.pieces][2] is PieceKind.UNCOVERED


class TestRendering:
    def test_host_document_exact_text(self):
        tu = rule_translate(HOST_SNIPPET)
        host, kernel = render_translated_unit(tu)
        assert host == (
            "void mm2_cuda (float * A , float * B) {\n"
            "    cl_mem A_gpu;\n"
            "    A_gpu = clCreateBuffer (context , CL_MEM_READ_WRITE , "
            "sizeof (float) * NI * NK , NULL , NULL);\n"
            "    clEnqueueWriteBuffer (command_queue , A_gpu , CL_TRUE , 0 , "
            "sizeof (float) * NI * NK , A , 0 , NULL , NULL);\n"
            "}\n"
        )
        assert kernel == ""

    def test_kernel_document_exact_text(self):
        tu = rule_translate(KERNEL_SNIPPET)
        host, kernel = render_translated_unit(tu)
        assert host == ""
        assert kernel == (
            "__kernel void mm2_kernel1 (__global float * A , __global float * B , "
            "__global float * C) {\n"
            "    int j = get_group_id (0) * get_local_size (0) + get_local_id (0);\n"
            "}\n"
        )

    def test_mixed_unit_splits_host_and_kernel(self):
        src = KERNEL_SNIPPET + HOST_SNIPPET
        tu = rule_translate(src)
        host, kernel = render_translated_unit(tu)
        assert "clCreateBuffer" in host and "__kernel" not in host
        assert "__kernel" in kernel and "clCreateBuffer" not in kernel

    def test_comment_and_directive_placement(self):
        src = "#include <cuda.h>\n// acquire\ncudaFree(p);\n"
        tu = rule_translate(src)
        host, _ = render_translated_unit(tu)
        assert host == "#include <cuda.h>\n// acquire\nclReleaseMemObject (p);\n"

    def test_kernel_region_comment_goes_to_kernel_file(self):
        src = "__global__ void k(float *a)\n{\n// body note\nint i = threadIdx.x;\n}\ncudaFree(p);\n"
        tu = rule_translate(src)
        host, kernel = render_translated_unit(tu)
        assert "// body note" in kernel
        assert "// body note" not in host
        assert "clReleaseMemObject" in host


class TestIdentityRoundTrip:
    def test_identity_preserves_every_token(self):
        src = KERNEL_SNIPPET + HOST_SNIPPET
        tree = make_tree()
        unit = preprocess_unit(src, LEX)
        tu = translate_unit(unit, tree, IdentityBackend())
        host, kernel = render_translated_unit(tu)
        expect_kernel = [
            t.text for s in unit.sentences if s.kernel for t in s.origin.tokens
        ]
        expect_host = [
            t.text for s in unit.sentences if not s.kernel for t in s.origin.tokens
        ]
        assert token_texts(kernel) == expect_kernel
        assert token_texts(host) == expect_host


class TestBackends:
    def _extern_script(self, tmp_path, body):
        script = tmp_path / "backend.py"
        script.write_text("#!/usr/bin/env python3\nimport sys\n" + body, encoding="utf-8")
        script.chmod(script.stat().st_mode | stat.S_IXUSR)
        return f"python3 {script}"

    def test_extern_identity_matches_internal(self, tmp_path):
        cmd = self._extern_script(
            tmp_path,
            "open(sys.argv[2], 'w').write(open(sys.argv[1]).read())\n",
        )
        reqs = [
            TranslationRequest("cudaFree ( _id0 ) ;", RequestKind.MATCHED),
            TranslationRequest("_tp0 _id0 ;", RequestKind.MATCHED),
        ]
        assert ExternalBackend(cmd).translate_requests(reqs) == IdentityBackend().translate_requests(reqs)

    def test_extern_line_count_mismatch(self, tmp_path):
        cmd = self._extern_script(tmp_path, "open(sys.argv[2], 'w').write('only one line\\n')\n")
        reqs = [
            TranslationRequest("a ;", RequestKind.MATCHED),
            TranslationRequest("b ;", RequestKind.MATCHED),
        ]
        with pytest.raises(BackendProtocolError):
            ExternalBackend(cmd).translate_requests(reqs)

    def test_extern_nonzero_exit(self, tmp_path):
        cmd = self._extern_script(tmp_path, "sys.exit(3)\n")
        with pytest.raises(BackendProtocolError):
            ExternalBackend(cmd).translate_requests([TranslationRequest("a ;", RequestKind.MATCHED)])

    def test_extern_never_sees_untranslatable_lines(self):
        seen = []

        class Spy(IdentityBackend):
            def translate_requests(self, requests):
                seen.extend(requests)
                return super().translate_requests(requests)

        src = (
            "void f(int n)\n{\nint x = n;\ncudaSetDevice(0);\nfloat *p;\n"
            "cudaMalloc((void **)&p, n);\ncudaFree(p);\n}\n"
        )
        tree = make_tree()
        translate_unit(preprocess_unit(src, LEX), tree, Spy())
        lines = [r.line for r in seen]
        # the uncovered cudaSetDevice line and the _lnt lines never reach it
        assert all("_line_not_to_translate" not in ln for ln in lines)
        assert all("cudaSetDevice" not in ln for ln in lines)
        assert lines == [
            "_tp0 _op0 _id0 ; _br cudaMalloc ( ( _tp0 _op0 ) _op1 _id0 , _id1 ) ;",
            "cudaFree ( _id0 ) ;",
        ]

    def test_make_backend(self):
        tree = make_tree()
        assert isinstance(make_backend("rules", tree, LEX), RuleBasedBackend)
        assert isinstance(make_backend("identity", tree, LEX), IdentityBackend)
        assert isinstance(make_backend("extern:cat", tree, LEX), ExternalBackend)
        with pytest.raises(BackendProtocolError):
            make_backend("nope", tree, LEX)

    def test_rule_backend_rejects_unknown_line(self):
        backend = RuleBasedBackend(make_tree(), LEX)
        with pytest.raises(BackendProtocolError):
            backend.translate_requests([TranslationRequest("cudaNope ( _id0 ) ;", RequestKind.MATCHED)])


class TestRestore:
    def test_restore_plain(self):
        smap = SymbolMap(["A_gpu", "NI"], ["*"], ["float"])
        syms = ["clFoo", "(", "_id0", ",", "sizeof", "(", "_tp0", ")", "_op0", "_id1", ")", ";"]
        assert restore_symbols(syms, smap) == [
            "clFoo", "(", "A_gpu", ",", "sizeof", "(", "float", ")", "*", "NI", ")", ";",
        ]

    def test_restore_rejects_leftover_capture(self):
        with pytest.raises(DanglingSymbol):
            restore_symbols(["f", "(", "_expr0", ")"], SymbolMap())

    def test_restore_out_of_range(self):
        with pytest.raises(DanglingSymbol):
            restore_symbols(["_id2"], SymbolMap(["a"], [], []))


class TestFormatter:
    def test_spacing_rules(self):
        assert format_tokens("for ( k = 0 ; k < NK ; k ++ ) {".split()) == "for (k = 0; k < NK; k++) {"
        assert format_tokens("C [ i * NJ + j ] += A [ i * NK + k ] * B [ k * NJ + j ] ;".split()) == (
            "C [ i * NJ + j ] += A [ i * NK + k ] * B [ k * NJ + j ];"
        )
        assert format_tokens("int j = get_group_id ( 0 ) ;".split()) == "int j = get_group_id (0);"

    def test_format_source_layout(self):
        src = "void f(int a)\n{\nif (a) {\ng(a, 1);\n}\n}\n"
        assert format_source(src, LEX) == (
            "void f (int a) {\n"
            "    if (a) {\n"
            "        g (a , 1);\n"
            "    }\n"
            "}\n"
        )

    def test_format_source_idempotent(self):
        src = HOST_SNIPPET + KERNEL_SNIPPET
        once = format_source(src, LEX)
        assert format_source(once, LEX) == once

    def test_empty_input(self):
        assert format_source("", LEX) == ""
        assert format_source("   \n\n", LEX) == ""
