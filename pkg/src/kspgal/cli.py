"""Command-line frontend.

Every subcommand prints a human-readable result, or with ``--json`` one
record ``{"schema", "command", "inputs", "outputs", "provenance"}``.
Big integers are written as decimal strings. Timing goes to stderr.

Exit codes: 0 success, 2 precondition violation (error object on stdout
with ``--json``, on stderr otherwise), 3 budget exceeded, 64 unknown
subcommand.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import cm_lattice, cm_types, cyclotomic, exact_arith, extensions, group_homology, groups, invariants

SCHEMA = "kspgal.cli/1"

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3
EXIT_UNKNOWN = 64


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _s(x):
    """JSON-friendly form: ints become decimal strings."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return exact_arith.rational_to_json(x)
    if isinstance(x, dict):
        return {str(k): _s(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_s(v) for v in x]
    return x


def _fmt_group(factors) -> str:
    if not factors:
        return "0"
    return " + ".join("Z" if d == 0 else f"Z/{d}" for d in factors)


# --------------------------------------------------------------------------
# group / module / subgroup specifications


def load_group(spec: str):
    """cyclic:N | units:Q | model:P | metabelian:Q:e1,e2,... | file:PATH"""
    kind, _, rest = spec.partition(":")
    if kind == "cyclic":
        return groups.cyclic_group(int(rest)), None
    if kind == "units":
        return groups.unit_group(int(rest)), None
    if kind == "model":
        return invariants.galois_model(int(rest)).G, None
    if kind == "metabelian":
        q, _, exps = rest.partition(":")
        G, _ = invariants.metabelian_model(int(q), _ints(exps) if exps else [])
        return G, None
    if kind == "file":
        with open(rest) as fh:
            obj = json.load(fh)
        G = groups.FiniteGroup.from_json(obj["group"])
        return G, obj
    raise UsageError(f"unknown group specification {spec!r}")


def load_module(G, spec: str, doc: dict | None):
    """twist:J (q read off the group) | trivial:n1,n2 | file (module stored
    with the group) | file:PATH"""
    kind, _, rest = spec.partition(":")
    if kind == "twist":
        sd = G.structure
        if isinstance(sd, groups.Semidirect):
            q = int(sd.Q.structure[1])
        elif isinstance(sd, tuple) and sd[0] == "units":
            q = int(sd[1])
        else:
            raise UsageError("twist modules need a unit group or a metabelian model")
        return groups.twist_module(G, q, int(rest))
    if kind == "trivial":
        return groups.trivial_module(G, _ints(rest))
    if kind == "file":
        if rest:
            with open(rest) as fh:
                doc = json.load(fh)
        if doc is None or "module" not in doc:
            raise UsageError("no module stored in the input file")
        return groups.GModule.from_json(G, doc["module"])
    raise UsageError(f"unknown module specification {spec!r}")


def load_subgroup(G, spec: str, doc: dict | None = None) -> list[int]:
    if spec == "c" and doc is not None and "H" in doc:
        return sorted(int(h) for h in doc["H"])
    if spec == "c":
        if not isinstance(G.structure, groups.Semidirect):
            raise UsageError("'c' needs a metabelian model")
        return sorted({G.identity, extensions.model_conjugation(G)})
    if spec == "trivial":
        return [G.identity]
    H = G.closure(_ints(spec))
    return sorted(H)


def _finite(G):
    if not isinstance(G, groups.FiniteGroup):
        raise UsageError(f"group of order {G.order} has no multiplication table (limit {groups.TABLE_LIMIT})")
    return G


def _phi(q: int, text: str | None) -> cm_types.CMType:
    if text is None:
        return cm_types.CMType(q, tuple(cm_types.pair_representatives(q)))
    return cm_types.CMType(q, tuple(_ints(text)))


# --------------------------------------------------------------------------
# commands; each returns (inputs, outputs, provenance, text)


def cmd_bernoulli(a):
    if a.n < 0:
        raise ValueError("n must be nonnegative")
    b = exact_arith.bernoulli(a.n)
    out = {"value": b}
    text = f"B_{a.n} = {b}"
    if a.mod is not None:
        r = exact_arith.bernoulli_mod_p(a.mod, a.n)[a.n]
        out["mod"] = {"p": a.mod, "value": r}
        text += f"  (= {r} mod {a.mod})"
    return {"n": a.n}, out, invariants.PROVED, text


def cmd_zeta(a):
    z = exact_arith.zeta_neg(a.k)
    return {"k": a.k}, {"value": z}, invariants.PROVED, f"zeta({1 - 2 * a.k}) = {z}"


def cmd_irregular(a):
    pairs = invariants.irregular_pairs(a.prime, method=a.method)
    idx = [pp.index for pp in pairs]
    return {"p": a.prime}, {"indices": idx}, invariants.PROVED, f"irregular indices at {a.prime}: {idx}"


def cmd_hminus(a):
    h = invariants.h_minus(a.q)
    return {"q": a.q}, {"h_minus": h}, invariants.PROVED, f"h^-(Q(zeta_{a.q})) = {h}"


def cmd_ksp(a):
    k = invariants.ksp_structure(a.degree, a.prime)
    rec = k.to_json()
    rec.pop("provenance")
    text = f"KSp_{a.degree}(Z; Z_{a.prime}): {k.shape}"
    if k.kernel_nonvanishing is not None:
        text += f", kernel nonvanishing: {str(k.kernel_nonvanishing).lower()}"
    return {"degree": a.degree, "p": a.prime}, rec, invariants.PROVED, text


def cmd_cmtype(a):
    if a.unit is not None:
        phi = cm_types.unit_cm_type(a.q, a.unit)
        return ({"q": a.q, "unit": a.unit}, {"members": list(phi.members)}, invariants.PROVED,
                " ".join(map(str, phi.members)))
    types = [list(t.members) for t in cm_types.enumerate_cm_types(a.q)]
    return {"q": a.q}, {"count": len(types), "types": types}, invariants.PROVED, "\n".join(
        " ".join(map(str, t)) for t in types)


def cmd_hodge_sum(a):
    phi = _phi(a.q, a.phi)
    s = cm_types.hodge_sum(phi, a.i)
    return {"q": a.q, "phi": list(phi.members), "i": a.i}, {"value": s}, invariants.PROVED, str(s)


def _form(a):
    if a.v is None:
        return cm_lattice.standard_form(a.q)
    coeffs = [Fraction(t) for t in a.v.replace(",", " ").split()]
    return cm_lattice.SkewHermitianForm(a.q, cyclotomic.CycElem(a.q, coeffs))


def _mat_text(m):
    return "\n".join(" ".join(f"{x:3d}" for x in row) for row in m)


def cmd_gram(a):
    f = _form(a)
    g = cm_lattice.symplectic_gram(f)
    return {"q": a.q, "v": f.v.to_json()}, {"gram": g}, invariants.PROVED, _mat_text(g)


def cmd_zeta_matrix(a):
    f = _form(a)
    s = cm_lattice.zeta_action_matrix(f)
    return {"q": a.q, "v": f.v.to_json()}, {"matrix": s}, invariants.PROVED, _mat_text(s)


def _homology_out(hg):
    return {"factors": hg.factors, "relative_to": hg.relative_to}


def cmd_homology(a):
    G, doc = load_group(a.group)
    M = load_module(G, a.module, doc)
    method = a.method
    if method == "auto":
        method = "bar" if isinstance(G, groups.FiniteGroup) else "hs"
    if method == "hs":
        if a.degree != 1:
            raise ValueError("the shortcut computes degree 1 only")
        hg = group_homology.hs_shortcut_h1(G, M)
    else:
        hg = group_homology.bar_homology(_finite(G), M, a.degree, budget=_budget(a))
    inputs = {"group": a.group, "module": a.module, "degree": a.degree, "method": method}
    return inputs, _homology_out(hg), _prov(a.group), f"H_{a.degree} = {_fmt_group(hg.factors)}"


def cmd_rel_homology(a):
    G, doc = load_group(a.group)
    M = load_module(G, a.module, doc)
    H = load_subgroup(G, a.subgroup, doc)
    method = a.method
    if method == "auto":
        method = "bar" if isinstance(G, groups.FiniteGroup) else "hs"
    if method == "hs":
        if a.degree != 1:
            raise ValueError("the shortcut computes degree 1 only")
        hg = group_homology.hs_shortcut_h1(G, M, H)
    else:
        hg = group_homology.relative_bar_homology(_finite(G), H, M, a.degree, budget=_budget(a))
    inputs = {"group": a.group, "module": a.module, "subgroup": H, "degree": a.degree, "method": method}
    return inputs, _homology_out(hg), _prov(a.group), f"H_{a.degree}(G, H) = {_fmt_group(hg.factors)}"


def cmd_universal_ext(a):
    G, doc = load_group(a.group)
    G = _finite(G)
    M = load_module(G, a.module, doc)
    H = load_subgroup(G, a.subgroup, doc)
    target = None
    if a.target:
        with open(a.target) as fh:
            tdoc = json.load(fh)
        target = extensions.Extension.from_json(G, tdoc["extension"])
        if target.M.to_json() != M.to_json() or sorted(target.H) != H:
            raise ValueError("target extension lives over a different (H, M)")
        M = target.M
    ext = extensions.universal_extension(G, H, M, budget=_budget(a))
    out = {"T": list(ext.T), "split_over_G": extensions.is_split_over_G(ext),
           "splitting": extensions.splitting_analysis(G, H, M).to_json()}
    if target is not None:
        mor = extensions.canonical_morphism(target, ext)
        out["canonical_morphism"] = {"matrix": mor.matrix.tolist(), "unique": mor.unique, "method": mor.method,
                                     "hom_MT_H_zero": mor.hom_MT_H_zero}
    if a.out:
        with open(a.out, "w") as fh:
            json.dump({"schema": SCHEMA, "group": G.to_json(), "module": M.to_json(), "H": H,
                       "extension": ext.to_json()},
                      fh, sort_keys=True)
    text = f"T^univ = {_fmt_group(ext.T)}; split over G: {str(out['split_over_G']).lower()}"
    if "canonical_morphism" in out:
        text += f"\ncanonical morphism {out['canonical_morphism']['matrix']} unique: {out['canonical_morphism']['unique']}"
    return {"group": a.group, "module": a.module, "subgroup": H}, out, _prov(a.group), text


def cmd_taniyama(a):
    if a.prime is not None:
        model = invariants.galois_model(a.prime)
        G, q, prov = model.G, a.prime, invariants.MODEL
    else:
        G, _ = invariants.metabelian_model(a.q, _ints(a.exponents) if a.exponents else [])
        q, prov = a.q, invariants.PROVED
    G = _finite(G)
    phi = _phi(q, a.phi)
    sd = G.structure
    sigma = sd.encode(_ints(a.a_part) if a.a_part else [0] * len(sd.A_factors), sd.Q.labels.index(a.sigma % q))
    w = extensions.make_section(G)
    M = groups.twist_module(G, q, a.j)
    H = sorted({G.identity, extensions.model_conjugation(G)})
    hg = group_homology.relative_bar_homology(G, H, M, 1)
    coords = extensions.taniyama_reduce(hg, sigma, phi, w)
    elem = extensions.taniyama_element(G, sigma, phi, w)
    out = {"H1_rel": hg.factors, "coords": coords, "element": list(elem), "hodge_weight": extensions.hodge_weight(M, phi),
           "identity_holds": True}
    inputs = {"q": q, "sigma": {"A": list(sd.decode(sigma)[0]), "unit": a.sigma % q}, "phi": list(phi.members),
              "j": a.j}
    return inputs, out, prov, f"H_1(G, <c>; mu^{a.j}) = {_fmt_group(hg.factors)}; Taniyama class {coords}"


def cmd_galois_model(a):
    m = invariants.galois_model(a.prime)
    if a.out:
        G = _finite(m.G)
        Mtw = groups.twist_module(G, a.prime, a.j)
        with open(a.out, "w") as fh:
            H = sorted({G.identity, extensions.model_conjugation(G)})
            json.dump({"schema": SCHEMA, "group": G.to_json(), "module": Mtw.to_json(), "H": H}, fh,
                      sort_keys=True)
    rec = m.to_json()
    rec.pop("provenance")
    text = f"|G| = {m.G.order}, A = {_fmt_group(m.A.factors)}, exponents {list(m.exponents)}"
    if m.degenerate:
        text += " (degenerate: regular prime)"
    return {"p": a.prime}, rec, invariants.MODEL, text


def cmd_cm_class(a):
    model = invariants.galois_model(a.prime)
    phi = _phi(a.prime, a.phi)
    label = tuple(_ints(a.label)) if a.label else ()
    x = invariants.CMClass(a.prime, a.k, phi, label)
    out = {"hodge": invariants.cm_class_hodge(x), "betti": invariants.cm_class_betti(x, model)}
    out["betti"].pop("provenance")
    if a.sigma is not None:
        G = model.G
        sd = G.structure
        sigma = sd.encode(_ints(a.a_part) if a.a_part else [0] * len(sd.A_factors),
                          sd.Q.labels.index(a.sigma % a.prime))
        y = invariants.galois_act_cm(sigma, x, model)
        out["sigma_image"] = y.to_json()
    text = f"hodge {out['hodge']}; betti {out['betti']['coords']} in {_fmt_group(out['betti']['factors'])}"
    return x.to_json(), out, invariants.MODEL, text


def cmd_chern(a):
    parts = [n for t in a.partition for n in _ints(t)]
    rep = invariants.chern_divisibility(parts, bound=a.bound)
    primes = {str(n): ps for n, ps in rep.primes.items()}
    out = {"primes": primes, "residual": {str(n): f for n, f in rep.residual.items()}}
    text = json.dumps(primes)
    if any(rep.residual.values()):
        text += "\n(residual cofactors left unfactored)"
    return {"partition": parts}, out, invariants.PROVED, text


def _budget(a):
    if a.budget is None:
        return None
    b = dict(group_homology.DEFAULT_BUDGET)
    for d in b:
        b[d] = a.budget
    return b


def _prov(spec: str) -> str:
    return invariants.MODEL if spec.startswith("model:") else invariants.PROVED


COMMANDS = {
    "bernoulli": cmd_bernoulli,
    "zeta": cmd_zeta,
    "irregular": cmd_irregular,
    "hminus": cmd_hminus,
    "ksp": cmd_ksp,
    "cmtype": cmd_cmtype,
    "hodge-sum": cmd_hodge_sum,
    "gram": cmd_gram,
    "zeta-matrix": cmd_zeta_matrix,
    "homology": cmd_homology,
    "rel-homology": cmd_rel_homology,
    "universal-ext": cmd_universal_ext,
    "taniyama": cmd_taniyama,
    "galois-model": cmd_galois_model,
    "cm-class": cmd_cm_class,
    "chern": cmd_chern,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kspgal", description="Bernoulli numbers, CM lattices and Galois extensions")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="emit a JSON record")
        return sp

    sp = add("bernoulli", "exact Bernoulli number B_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mod", type=int, help="also reduce mod this prime")
    sp = add("zeta", "zeta(1 - 2k)")
    sp.add_argument("--k", type=int, required=True)
    sp = add("irregular", "irregular pairs (p, 2k)")
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--method", choices=["modp", "exact"], default="modp")
    sp = add("hminus", "relative class number of Q(zeta_q)")
    sp.add_argument("--q", type=int, required=True)
    sp = add("ksp", "structure of KSp_i(Z; Z_p)")
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--prime", type=int, required=True)
    sp = add("cmtype", "enumerate CM types, or one with unit Hodge sum")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--unit", type=int, help="odd i: return a CM type with unit i-th Hodge sum")
    sp = add("hodge-sum", "sum of a^i over a CM type, mod q")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--phi", help="members, comma separated (default: 1..(q-1)/2 pair representatives)")
    sp.add_argument("--i", type=int, required=True)
    for name, help_ in (("gram", "Gram matrix of the trace pairing"), ("zeta-matrix", "matrix of zeta")):
        sp = add(name, help_)
        sp.add_argument("--q", type=int, required=True)
        sp.add_argument("--v", help="multiplier in the power basis (default: inverse different)")
    for name, help_ in (("homology", "H_d(G; M)"), ("rel-homology", "H_d(G, H; M)")):
        sp = add(name, help_)
        sp.add_argument("--group", required=True, help="cyclic:N | units:Q | model:P | metabelian:Q:e,.. | file:PATH")
        sp.add_argument("--module", required=True, help="twist:J | trivial:n,.. | file[:PATH]")
        sp.add_argument("--degree", type=int, default=1)
        sp.add_argument("--method", choices=["auto", "bar", "hs"], default="auto")
        sp.add_argument("--budget", type=int, help="cell budget for the bar complex")
        if name == "rel-homology":
            sp.add_argument("--subgroup", default="c", help="c | trivial | element list")
    sp = add("universal-ext", "universal extension and splitting data")
    sp.add_argument("--group", required=True)
    sp.add_argument("--module", required=True)
    sp.add_argument("--subgroup", default="c")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--out", help="write group, module and extension as JSON")
    sp.add_argument("--target", help="extension file to compute the canonical morphism into")
    sp = add("taniyama", "Taniyama class in H_1(G, <c>; mu^j)")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--prime", type=int, help="use the class-group model at this prime")
    g.add_argument("--q", type=int, help="toy model modulus")
    sp.add_argument("--exponents", help="toy model action exponents")
    sp.add_argument("--sigma", type=int, required=True, help="unit part of sigma")
    sp.add_argument("--a-part", help="A-coordinates of sigma")
    sp.add_argument("--phi")
    sp.add_argument("--j", type=int, required=True)
    sp = add("galois-model", "metabelian model of the Galois group of the Hilbert class field")
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--out", help="write group and twist module as JSON")
    sp.add_argument("--j", type=int, default=1, help="twist stored with --out")
    sp = add("cm-class", "Hodge and Betti coordinates of a CM class")
    sp.add_argument("--prime", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--phi")
    sp.add_argument("--label")
    sp.add_argument("--sigma", type=int, help="also apply sigma (unit part)")
    sp.add_argument("--a-part")
    sp = add("chern", "primes dividing Chern numbers")
    sp.add_argument("--partition", nargs="+", required=True)
    sp.add_argument("--bound", type=int, default=10**6)
    return p


def _emit(rec, as_json, stream):
    if as_json:
        stream.write(json.dumps(rec, sort_keys=True) + "\n")


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    want_json = "--json" in argv
    cmd = next((t for t in argv if not t.startswith("-")), None)
    if cmd not in COMMANDS:
        err = {"schema": SCHEMA, "error": {"kind": "unknown-subcommand", "message": f"unknown subcommand {cmd!r}",
                                           "choices": sorted(COMMANDS)}}
        _emit(err, want_json, stdout)
        if not want_json:
            stderr.write(f"kspgal: unknown subcommand {cmd!r}; choose from {', '.join(sorted(COMMANDS))}\n")
        return EXIT_UNKNOWN
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        inputs, outputs, prov, text = COMMANDS[cmd](args)
    except group_homology.BudgetExceeded as e:
        return _fail(stdout, stderr, want_json, cmd, "budget-exceeded", e, EXIT_BUDGET)
    except (UsageError, ValueError, ArithmeticError, KeyError, OSError, json.JSONDecodeError) as e:
        return _fail(stdout, stderr, want_json, cmd, type(e).__name__, e, EXIT_PRECONDITION)
    rec = {"schema": SCHEMA, "command": cmd, "inputs": _s(inputs), "outputs": _s(outputs), "provenance": prov}
    if want_json:
        _emit(rec, True, stdout)
    else:
        stdout.write(text + "\n")
    stderr.write(f"[{cmd}] {time.perf_counter() - t0:.3f}s\n")
    return EXIT_OK


def _fail(stdout, stderr, want_json, cmd, kind, exc, code):
    err = {"schema": SCHEMA, "command": cmd, "error": {"kind": kind, "message": str(exc)}}
    if want_json:
        _emit(err, True, stdout)
    else:
        stderr.write(json.dumps(err, sort_keys=True) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
