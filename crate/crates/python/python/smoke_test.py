"""Smoke test for the texcas extension module.

Build with `cargo build -p texcas-python` and put the shared library on the
path as `texcas.so` (see the README), then run this script.
"""

import texcas

lex = texcas.Lexicon.seed()
assert len(lex) > 0

out, infos = texcas.translate_forward(r"\sin@@{z}")
assert out == "sin(z)", out
assert any(line.startswith("info:") for line in infos)

out, _ = texcas.translate_forward(r"\JacobiP{\alpha}{\beta}{n}@{\cos@{a\Theta}}", "mathematica", lex)
assert out == "JacobiP[n,\\[Alpha],\\[Beta],Cos[a \\[CapitalTheta]]]", out

out, _ = texcas.translate_backward("x")
assert out == "x", out

tree = texcas.parse_maple("x=0..infinity", compat_prefix=True)
assert tree.startswith("[_Inert_EQUATION"), tree

report = texcas.round_trip(r"\frac{\cos@{a\Theta}}{2}")
assert report["fixed_point_reached"], report
assert report["error"] is None

outcome, diff = texcas.check_equivalence("sin(z)^2+cos(z)^2", "1", ["z"])
assert outcome in ("symbolic-zero", "numeric-converged"), outcome
assert diff is not None and diff < 1e-10

outcome, _ = texcas.check_equivalence("sin(z)", "cos(z)", ["z"])
assert outcome == "numeric-mismatch", outcome

for bad, exc in [(r"\qhyperg{a}{b}", texcas.TranslationError), (r"\frac{a}{b", texcas.ParseError)]:
    try:
        texcas.translate_forward(bad)
    except exc:
        pass
    else:
        raise AssertionError(f"{bad} should raise {exc.__name__}")

try:
    texcas.Lexicon.compile("not,a,header\n")
except texcas.LexiconSchemaError:
    pass
else:
    raise AssertionError("bad header should be rejected")

print("smoke test passed")
