from pathlib import Path

import pytest

from grs import dsl


SPEC_DIR = Path(__file__).resolve().parents[1] / "src" / "grs" / "specs"
SPEC_FILES = sorted(SPEC_DIR.glob("*.grs"))


class TestTokenizer:
    def test_basic_stream(self):
        toks, diags = dsl.tokenize("field f = 2 + x # trailing comment\n")
        assert not diags
        assert [t.text for t in toks[:-1]] == ["field", "f", "=", "2", "+", "x"]
        assert toks[-1].kind == "EOF"

    def test_range_dots_split_from_numbers(self):
        toks, _ = dsl.tokenize("-2..2")
        texts = [t.text for t in toks[:-1]]
        assert texts == ["-", "2", "..", "2"]

    def test_wedge_token(self):
        toks, _ = dsl.tokenize("dx ^w dy")
        assert [t.text for t in toks[:-1]] == ["dx", "^w", "dy"]

    def test_caret_before_name_is_power(self):
        # "^wt" would swallow a name if "^w" were lexed greedily
        toks, _ = dsl.tokenize("x ^wt")
        assert [t.text for t in toks[:-1]] == ["x", "^", "wt"]

    def test_scientific_notation(self):
        toks, _ = dsl.tokenize("1e-9 2.5E+3")
        vals = [t.text for t in toks[:-1]]
        assert vals == ["1e-9", "2.5E+3"]

    def test_bad_character_reported(self):
        _, diags = dsl.tokenize("field f = 2 ? 3")
        assert any(d.severity == "error" for d in diags)


class TestParser:
    def test_precedence(self):
        ast, diags = dsl.parse_expression("2 + 3 * 4 ^ 2")
        assert not diags
        assert isinstance(ast, dsl.Bin) and ast.op == "+"
        mul = ast.b
        assert isinstance(mul, dsl.Bin) and mul.op == "*"
        assert isinstance(mul.b, dsl.Bin) and mul.b.op == "^"

    def test_unary_minus_binds_looser_than_power(self):
        ast, _ = dsl.parse_expression("-x^2")
        assert isinstance(ast, dsl.Un) and ast.op == "-"
        assert isinstance(ast.a, dsl.Bin) and ast.a.op == "^"

    def test_power_right_associative(self):
        ast, _ = dsl.parse_expression("2^3^2")
        assert isinstance(ast, dsl.Bin) and ast.op == "^"
        assert isinstance(ast.b, dsl.Bin) and ast.b.op == "^"

    def test_call(self):
        ast, _ = dsl.parse_expression("sin(x - y)")
        assert isinstance(ast, dsl.Call) and ast.fn == "sin"

    def test_document(self):
        doc, diags = dsl.parse(
            "chart R2 (x, y) metric diag(1, 1)\n"
            "field f = x * y\n"
            "check first_integral(f, f) on grid(-1..1, -1..1; 5) tol 1e-8\n")
        assert not diags
        kinds = [type(s).__name__ for s in doc.statements]
        assert kinds == ["ChartStmt", "FieldStmt", "CheckStmt"]
        chk = doc.statements[2]
        assert chk.tol == 1e-8
        assert chk.sample.kind == "grid"

    def test_error_recovery_reports_each_statement(self):
        doc, diags = dsl.parse(
            "chart R1 (x) metric diag(1)\n"
            "field f = 2 +\n"
            "field g = * 3\n"
            "field h = x\n")
        errors = [d for d in diags if d.severity == "error"]
        assert len(errors) == 2

    def test_keyword_cannot_be_expression(self):
        _, diags = dsl.parse("chart R1 (x) metric diag(1)\nfield f = check\n")
        assert any("keyword" in d.message for d in diags)


class TestPrinter:
    @pytest.mark.parametrize("path", SPEC_FILES, ids=lambda p: p.stem)
    def test_round_trip_shipped_specs(self, path):
        text = path.read_text()
        doc, diags = dsl.parse(text)
        assert doc is not None and not diags, path.name
        printed = dsl.print_document(doc)
        doc2, diags2 = dsl.parse(printed)
        assert doc2 is not None and not diags2
        assert dsl.print_document(doc2) == printed

    def test_expression_round_trip(self):
        src = "-(x + 2.0) ^ 2 * sin(y) / 3.0"
        ast, _ = dsl.parse_expression(src)
        printed = dsl.print_expr(ast)
        ast2, _ = dsl.parse_expression(printed)
        assert dsl.print_expr(ast2) == printed


class TestBinder:
    def _load(self, text):
        return dsl.load(text)

    def test_simple_document_binds(self):
        checks, diags = self._load(
            "chart R2 (x, y) metric diag(1, 1)\n"
            "vector X : 1 = -y * dx + x * dy\n"
            "field r2 = x^2 + y^2\n"
            "check first_integral(X, r2) on random(-2..2, -2..2; 50, seed 3)\n")
        assert not diags
        assert len(checks) == 1
        c = checks[0]
        assert c.entry == "first_integral"
        assert c.name == "first_integral"
        assert c.sample.requested == 50

    def test_repeated_checks_get_suffix(self):
        text = (
            "chart R1 (x) metric diag(1)\n"
            "vector X : 1 = 1 * dx\n"
            "field f = 2\n"
            "check first_integral(X, f) on grid(-1..1; 3)\n"
            "check first_integral(X, f) on grid(-1..1; 3)\n")
        checks, diags = self._load(text)
        assert not diags
        assert [c.name for c in checks] == ["first_integral", "first_integral#2"]

    def test_unknown_name_reported_with_use_site(self):
        _, diags = self._load(
            "chart R1 (x) metric diag(1)\n"
            "field f = x * missing\n")
        errors = [d for d in diags if d.severity == "error"]
        assert errors and "missing" in errors[0].message
        assert errors[0].line == 2

    def test_unknown_entry(self):
        _, diags = self._load(
            "chart R1 (x) metric diag(1)\n"
            "field f = x\n"
            "check no_such_entry(f) on grid(-1..1; 3)\n")
        assert any(d.severity == "error" for d in diags)

    def test_degree_exceeds_chart_dimension(self):
        _, diags = self._load(
            "chart M (x, y, z, xi) metric diag(-1, -1, -1, 1)\n"
            "form w : 5 = 1 * dx ^w dy\n")
        assert any(d.severity == "error" for d in diags)

    def test_sample_dimension_mismatch(self):
        _, diags = self._load(
            "chart R2 (x, y) metric diag(1, 1)\n"
            "field f = x\n"
            "check first_integral(f, f) on grid(-1..1; 3)\n")
        assert any(d.severity == "error" for d in diags)

    def test_imaginary_unit_unless_shadowed(self):
        checks, diags = self._load(
            "chart R2 (x, xi) metric diag(1, 1)\n"
            "vector X : 1 = 1 * dx\n"
            "field f = exp(-i * xi)\n"
            "check first_integral(X, f) on grid(-1..1, -1..1; 3)\n")
        assert not diags
        checks2, diags2 = self._load(
            "chart R2 (i, xi) metric diag(1, 1)\n"
            "vector X : 1 = 1 * di\n"
            "field f = 2 * i\n"
            "check first_integral(X, f) on grid(-1..1, -1..1; 3)\n")
        assert not diags2

    def test_new_chart_clears_scope(self):
        _, diags = self._load(
            "chart R1 (x) metric diag(1)\n"
            "field f = x\n"
            "chart R2 (u, v) metric diag(1, 1)\n"
            "field g = f + u\n")
        assert any(d.severity == "error" for d in diags)

    def test_algebra_bracket_binding(self):
        checks, diags = self._load(
            "chart R3 (x, y, z) metric diag(1, 1, 1)\n"
            "algebra su2 dim 3 bracket (1, 2, 3, 1) (2, 3, 1, 1) (3, 1, 2, 1)\n"
            "form a : 1 values su2 = x * dy @ e1\n"
            "check bianchi(a) on random(-2..2, -2..2, -2..2; 20, seed 1)\n")
        assert not diags
        assert len(checks) == 1
