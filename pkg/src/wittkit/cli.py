"""Command-line surface tying the modules together.

Subcommands: field (inspect a base field), drf (ray class monoids), witt
(vector certificates, orbits, moduli, an exploratory cyclic search),
automata (DFAO export and the state-complexity check), modular (evaluate
deformation families at CM points), algrec (minimal polynomials, class
polynomials), check (the modularity desk check), pipeline (cached,
deterministic artifact sets from a config file).

Exit codes: 0 pass, 1 check failed, 2 usage, 3 precision or bound too small.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

import mpmath

from . import algrec, automata, modular, rayclass, witt
from .domains import BigComplex, ExactCyclotomic
from .errors import (
    InsufficientBoundError,
    NoRelationError,
    PrecisionError,
    UsageError,
    WittkitError,
)
from .qfield import (
    IdealHNF,
    QuadElement,
    QuadField,
    class_group,
    class_number,
    enumerate_ideals,
    ideal_add,
    ideal_divisors,
    ideal_from_json,
    make_field,
    prime_ideals,
    principal_ideal,
)

EXIT_PASS = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_PRECISION = 3

DESK_CHECK_TRIPLES = ((-1, 2, 60), (-5, 1, 60), (-3, 2, 40))


# ---------------------------------------------------------------------------
# shared parsing and output helpers


def parse_field(token) -> QuadField:
    text = str(token).strip()
    if text.upper() == "Q":
        return make_field(1)
    try:
        value = int(text)
    except ValueError:
        raise UsageError(f"field must be 'Q' or an integer, got {token!r}") from None
    return make_field(value)


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None


def parse_ideal(field: QuadField, token) -> IdealHNF:
    """Ideal tokens: 'N' (principal), 'x,y' (generated by x + y*w), 'a:b:c[:den]'."""
    if isinstance(token, dict):
        return ideal_from_json(field, token)
    text = str(token).strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1].strip()
    if ":" in text:
        try:
            parts = [int(p) for p in text.split(":")]
        except ValueError:
            raise UsageError(f"malformed HNF ideal token {token!r}") from None
        if len(parts) not in (3, 4):
            raise UsageError(f"HNF tokens need 3 or 4 integers, got {token!r}")
        den = parts[3] if len(parts) == 4 else 1
        return IdealHNF(field, parts[0], parts[1], parts[2], den)
    if "," in text:
        xs, ys = text.split(",", 1)
        return principal_ideal(QuadElement(field, _parse_fraction(xs), _parse_fraction(ys)))
    return principal_ideal(QuadElement(field, _parse_fraction(text), Fraction(0)))


def parse_family(field: QuadField, text: str):
    t = text.strip()
    if t == "j":
        return modular.JFamily()
    if t.startswith("fricke:"):
        parts = t[len("fricke:") :].split(",")
        if len(parts) != 2:
            raise UsageError("fricke families need two indices, like fricke:1/2,0")
        return modular.FrickeFamily((_parse_fraction(parts[0]), _parse_fraction(parts[1])))
    if t.startswith("char:"):
        return modular.char_family_from_ideal(parse_ideal(field, t[len("char:") :]))
    raise UsageError(f"unknown family {text!r}; expected j, fricke:a1,a2, or char:<ideal>")


def stamp(payload: dict, *, bound=None, primes=None, depth=None, prec=None) -> dict:
    out = dict(payload)
    out["params"] = {
        "bound": bound,
        "prime_norm_bound": primes,
        "depth": depth,
        "prec": prec,
    }
    return out


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _canonical_bytes(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode()


def _sha256(obj) -> str:
    return hashlib.sha256(_canonical_bytes(obj)).hexdigest()


# ---------------------------------------------------------------------------
# vector specs

_SPEC_KINDS = ("zeta", "zlin", "rho", "modular")


def vector_from_spec(spec: dict) -> witt.WittVector:
    kind = spec.get("kind")
    if kind == "zeta":
        g = _parse_fraction(str(spec["gamma"]))
        return witt.zeta_gamma(g.denominator, g.numerator, int(spec.get("bound", 200)))
    if kind == "zlin":
        terms = spec.get("terms", [])
        if not terms:
            raise UsageError("zlin specs need a nonempty 'terms' list")
        coeffs = [_parse_fraction(str(c)) for c, _ in terms]
        gammas = [_parse_fraction(str(g)) for _, g in terms]
        return witt.zlinear_combine(coeffs, gammas, int(spec.get("bound", 200)))
    if kind == "rho":
        field = parse_field(spec.get("d", "Q"))
        return witt.rho_vector(parse_ideal(field, spec["ideal"]), int(spec.get("bound", 30)))
    if kind == "modular":
        field = parse_field(spec["d"])
        fam = parse_family(field, str(spec.get("family", "j")))
        return modular.modular_vector(
            fam, field, int(spec.get("bound", 40)), int(spec.get("prec", 120))
        )
    raise UsageError(f"unknown vector kind {kind!r}; expected one of {', '.join(_SPEC_KINDS)}")


def vector_from_stored(data: dict) -> witt.WittVector:
    field = make_field(int(data["d"]))
    dom = data["domain"]
    if dom["kind"] == "bigcomplex":
        domain = BigComplex(int(dom["prec"]))
    elif dom["kind"] == "cyclotomic":
        domain = ExactCyclotomic(int(dom["M"]))
    else:
        raise UsageError("stored vectors with a number-field domain cannot be reloaded")
    values = {}
    for ideal_json, vjson in data["values"]:
        values[ideal_from_json(field, ideal_json)] = domain.value_from_json(vjson)
    return witt.WittVector(field, domain, int(data["bound"]), values=values)


def load_vector(path: str) -> witt.WittVector:
    data = json.loads(Path(path).read_text())
    if data.get("schema") == "wittkit/vector/1":
        return vector_from_stored(data)
    return vector_from_spec(data)


def _vector_csv(xi: witt.WittVector) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["ideal", "re", "im"])
    for a in xi.ideals():
        re, im = xi.domain.value_to_json(xi.value_at(a))
        writer.writerow([witt.ideal_label(a), re, im])
    return buf.getvalue()


def _domain_prec(xi: witt.WittVector):
    return getattr(xi.domain, "prec", None)


# ---------------------------------------------------------------------------
# payload builders shared by subcommands and the pipeline


def field_info_payload(field: QuadField, prime_bound: int) -> dict:
    return {
        "schema": "wittkit/field/1",
        "d": field.d,
        "disc": field.disc,
        "omega_rule": f"w^2 = {field.omega_s}*w + {field.omega_t}",
        "rational": field.is_rational,
        "class_number": class_number(field),
        "class_group": [witt.ideal_label(r) for r in class_group(field)],
        "n_units": len(field.units()),
        "primes": [witt.ideal_label(p) for p in prime_ideals(field, prime_bound)],
    }


def classpoly_payload(rep: algrec.ClassPolyReport) -> dict:
    with mpmath.workdps(40):
        j_values = [
            [mpmath.nstr(mpmath.mpc(v).real, 30), mpmath.nstr(mpmath.mpc(v).imag, 30)]
            for v in rep.j_values
        ]
        errors = [mpmath.nstr(mpmath.mpf(e), 5) for e in rep.rounding_errors]
    return {
        "schema": "wittkit/classpoly/1",
        "d": rep.d,
        "h": rep.h,
        "poly": rep.poly.to_json(),
        "rounding_errors": errors,
        "j_values": j_values,
    }


def certify_payload(rep: algrec.CertifyReport) -> dict:
    return {
        "schema": "wittkit/certify/1",
        "ok": rep.ok,
        "all_integral": rep.all_integral,
        "note": rep.note,
        "poly": rep.poly.to_json() if rep.poly is not None else None,
        "value_polys": [p.to_json() for p in rep.value_polys] if rep.value_polys else [],
    }


def _level_family_names(field: QuadField, level: int) -> list[str]:
    names = [modular.JFamily().describe()]
    for i in range(level):
        for j in range(level):
            if i == 0 and j == 0:
                continue
            fam = modular.FrickeFamily((Fraction(i, level), Fraction(j, level)))
            names.append(fam.describe())
    return names


def modularity_check(field: QuadField, level: int, bound: int, prec: int) -> dict:
    """Compare the shift partition of Xi(level) with ray classes mod level*O_K.

    Also verifies that each shift class has a constant gcd with level*O_K,
    and flags pairs whose verdict flips within one order of the tolerance.
    """
    if level < 1:
        raise UsageError(f"level must be >= 1, got {level}")
    if field.is_rational:
        raise UsageError("the desk check runs over imaginary quadratic fields")
    vectors = modular.level_family_vectors(field, level, bound, prec)
    ideals = list(enumerate_ideals(field, bound))
    tol_digits = prec // 3
    with mpmath.workdps(prec + 15):
        tol = mpmath.mpf(10) ** -tol_digits
        loose = tol * 10
    xi_labels = witt.shift_partition(vectors, ideals, tol=tol)
    xi_loose = witt.shift_partition(vectors, ideals, tol=loose)
    nok = principal_ideal(QuadElement(field, Fraction(level), Fraction(0)))
    _, ray_labels = rayclass.classify_ideals(nok, ideals)

    mismatches = []
    ambiguous = []
    n = len(ideals)
    for i in range(n):
        for j in range(i + 1, n):
            same_xi = xi_labels[i] == xi_labels[j]
            if same_xi != (ray_labels[i] == ray_labels[j]) and len(mismatches) < 40:
                mismatches.append([witt.ideal_label(ideals[i]), witt.ideal_label(ideals[j])])
            if not same_xi and xi_loose[i] == xi_loose[j] and len(ambiguous) < 40:
                ambiguous.append([witt.ideal_label(ideals[i]), witt.ideal_label(ideals[j])])

    gcd_by_class: dict[int, set] = {}
    for a, lab in zip(ideals, xi_labels):
        gcd_by_class.setdefault(lab, set()).add(ideal_add(a, nok).key())
    gcd_constant = all(len(s) == 1 for s in gcd_by_class.values())

    partitions_equal = not mismatches
    return {
        "schema": "wittkit/modcheck/1",
        "d": field.d,
        "level": level,
        "tolerance": f"1e-{tol_digits}",
        "n_ideals": n,
        "families": _level_family_names(field, level),
        "shift_classes": max(xi_labels) + 1,
        "ray_classes": max(ray_labels) + 1,
        "partitions_equal": partitions_equal,
        "mismatches": mismatches,
        "ambiguous_pairs": ambiguous,
        "gcd_constant_per_class": gcd_constant,
        "passed": partitions_equal and gcd_constant,
    }


# ---------------------------------------------------------------------------
# subcommand handlers


def cmd_field_info(args) -> int:
    field = parse_field(args.d)
    payload = stamp(field_info_payload(field, args.primes), primes=args.primes)
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_drf_build(args) -> int:
    field = parse_field(args.d)
    modulus = parse_ideal(field, args.modulus)
    monoid = rayclass.build_drf(field, modulus, args.bound)
    payload = stamp(monoid.to_json(), bound=monoid.enumeration_bound)
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_witt_verify(args) -> int:
    xi = load_vector(args.vector)
    rep = witt.check_un(xi, args.depth, args.primes)
    payload = stamp(
        rep.to_json(),
        bound=xi.bound,
        primes=args.primes,
        depth=args.depth,
        prec=_domain_prec(xi),
    )
    _emit(payload, args.out)
    return EXIT_PASS if rep.passed else EXIT_CHECK_FAILED


def cmd_witt_orbit(args) -> int:
    xi = load_vector(args.vector)
    monoid = witt.orbit_monoid([xi], args.primes)
    payload = stamp(
        monoid.to_json(), bound=xi.bound, primes=args.primes, prec=_domain_prec(xi)
    )
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_witt_modulus(args) -> int:
    xi = load_vector(args.vector)
    if args.candidate_bound is not None:
        candidates = list(enumerate_ideals(xi.field, args.candidate_bound))
    elif xi.gring is not None:
        level = principal_ideal(QuadElement(xi.field, Fraction(xi.gring_L), Fraction(0)))
        candidates = ideal_divisors(level)
    else:
        candidates = list(enumerate_ideals(xi.field, 16))
    found = witt.find_modulus(xi, candidates)
    payload = stamp(
        {
            "schema": "wittkit/modulus/1",
            "found": found is not None,
            "modulus": found.to_json() if found is not None else None,
            "label": witt.ideal_label(found) if found is not None else None,
            "n_candidates": len(candidates),
        },
        bound=xi.bound,
        prec=_domain_prec(xi),
    )
    _emit(payload, args.out)
    return EXIT_PASS


def _cyclic_candidates(max_den: int, coeff_bound: int, limit: int):
    gammas = sorted(
        {
            Fraction(p, q)
            for q in range(2, max_den + 1)
            for p in range(1, q)
            if math.gcd(p, q) == 1
        }
    )
    coeffs = [c for c in range(-coeff_bound, coeff_bound + 1) if c]
    count = 0
    for g in gammas:
        for c in coeffs:
            yield ((c, g),)
            count += 1
            if count >= limit:
                return
    for i in range(len(gammas)):
        for j in range(i + 1, len(gammas)):
            for c1 in coeffs:
                for c2 in coeffs:
                    yield ((c1, gammas[i]), (c2, gammas[j]))
                    count += 1
                    if count >= limit:
                        return


def cmd_witt_cyclic_search(args) -> int:
    """Search small integer combinations of zeta^(gamma) for a target orbit size.

    Exploratory only: hits are reported as found, and nothing is claimed
    about combinations outside the enumerated window.
    """
    hits = []
    tried = 0
    for combo in _cyclic_candidates(args.max_den, args.coeff_bound, args.limit):
        tried += 1
        xi = witt.zlinear_combine([c for c, _ in combo], [g for _, g in combo], args.bound)
        try:
            monoid = witt.orbit_monoid([xi], args.primes)
        except InsufficientBoundError:
            continue
        if len(monoid) == args.target_size:
            hits.append(
                {
                    "terms": [[c, str(g)] for c, g in combo],
                    "orbit_size": len(monoid),
                    "reps": [witt.ideal_label(r) for r in monoid.reps],
                }
            )
            if len(hits) >= args.max_hits:
                break
    payload = stamp(
        {
            "schema": "wittkit/cyclic-search/1",
            "target_size": args.target_size,
            "tried": tried,
            "n_hits": len(hits),
            "hits": hits,
            "note": "exploratory search over a finite window; asserts nothing",
        },
        bound=args.bound,
        primes=args.primes,
    )
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_automata(args) -> int:
    xi = load_vector(args.vector)
    if args.action == "check-bridy":
        rep = automata.check_bridy([xi], args.primes)
        payload = stamp(
            rep.to_json(), bound=rep.bound, primes=args.primes, prec=_domain_prec(xi)
        )
        _emit(payload, args.out)
        return EXIT_PASS if rep.equal else EXIT_CHECK_FAILED
    machine = automata.dfao_from_witt([xi], args.primes)
    if args.action == "minimize":
        machine = automata.minimize(machine)
    if args.dot:
        Path(args.dot).write_text(automata.export_dot(machine))
    payload = stamp(
        machine.to_json(), bound=machine.bound, primes=args.primes, prec=_domain_prec(xi)
    )
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_modular_eval(args) -> int:
    field = parse_field(args.d)
    family = parse_family(field, args.family)
    xi = modular.modular_vector(family, field, args.bound, args.prec)
    payload = stamp(xi.to_json(), bound=args.bound, prec=args.prec)
    payload["family"] = family.describe()
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_algrec_minpoly(args) -> int:
    data = json.loads(Path(args.value_from).read_text())
    if data.get("schema") != "wittkit/vector/1":
        raise UsageError(f"{args.value_from} is not a stored vector")
    xi = vector_from_stored(data)
    if xi.domain.kind != "bigcomplex":
        raise UsageError("minpoly reads numeric vectors; this one is exact already")
    target = parse_ideal(xi.field, args.index)
    if target not in xi.ideals():
        raise UsageError(
            f"ideal {witt.ideal_label(target)} is outside the stored bound {xi.bound}"
        )
    poly = algrec.minpoly(xi.value_at(target), args.dmax, prec=xi.domain.prec)
    payload = stamp(
        {
            "schema": "wittkit/minpoly/1",
            "index": witt.ideal_label(target),
            "found": poly is not None,
            "poly": poly.to_json() if poly is not None else None,
        },
        bound=xi.bound,
        prec=xi.domain.prec,
    )
    _emit(payload, args.out)
    if poly is None:
        print(
            "no relation found: the value may be transcendental or the precision too low",
            file=sys.stderr,
        )
        return EXIT_PRECISION
    return EXIT_PASS


def cmd_algrec_classpoly(args) -> int:
    rep = algrec.class_polynomial(args.d, args.prec)
    payload = stamp(classpoly_payload(rep), prec=args.prec)
    _emit(payload, args.out)
    return EXIT_PASS


def cmd_check(args) -> int:
    if args.d is None:
        triples = DESK_CHECK_TRIPLES
    else:
        triples = ((args.d, args.level, args.bound),)
    results = []
    for d, level, bound in triples:
        field = parse_field(d)
        result = stamp(modularity_check(field, level, bound, args.prec), bound=bound, prec=args.prec)
        results.append(result)
        verdict = "PASS" if result["passed"] else "FAIL"
        print(
            f"{verdict} d={d} N={level} B={bound} prec={args.prec}: "
            f"{result['shift_classes']} shift classes, {result['ray_classes']} ray classes, "
            f"gcds {'constant' if result['gcd_constant_per_class'] else 'NOT constant'}",
            file=sys.stderr,
        )
    passed = all(r["passed"] for r in results)
    payload = {"schema": "wittkit/check/1", "results": results, "passed": passed}
    _emit(payload, args.out)
    return EXIT_PASS if passed else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# pipeline

_ALL_JOBS = (
    "field",
    "drf",
    "vector",
    "orbit",
    "dfao",
    "bridy",
    "components",
    "classpoly",
    "certify",
    "check",
)


@dataclass(frozen=True)
class RunConfig:
    d: int = -5
    bound: int = 40
    prime_norm_bound: int = 10
    depth: int = 2
    prec: int = 120
    level: int = 1
    modulus: str = "2"
    family: str = "j"
    dmax: int = 8
    jobs: tuple[str, ...] = _ALL_JOBS
    out_dir: str = "artifacts"
    cache_dir: str | None = None

    def validate(self) -> None:
        for name in ("bound", "prime_norm_bound", "prec", "level", "dmax"):
            if getattr(self, name) < 1:
                raise UsageError(f"{name} must be positive")
        if self.depth < 0:
            raise UsageError("depth must be >= 0")
        if self.prec < 40:
            raise UsageError("pipeline precision must be >= 40")
        unknown = [j for j in self.jobs if j not in _ALL_JOBS]
        if unknown:
            raise UsageError(f"unknown jobs: {', '.join(unknown)}")

    def canonical(self) -> dict:
        """The knobs that affect artifact contents; paths are excluded."""
        return {
            "d": self.d,
            "bound": self.bound,
            "prime_norm_bound": self.prime_norm_bound,
            "depth": self.depth,
            "prec": self.prec,
            "level": self.level,
            "modulus": self.modulus,
            "family": self.family,
            "dmax": self.dmax,
        }


def load_config(path: str | None, overrides: dict) -> RunConfig:
    data: dict = {}
    if path is not None:
        raw = Path(path).read_text()
        if path.endswith(".toml"):
            try:
                import tomllib
            except ImportError:
                raise UsageError("TOML configs need Python 3.11+; use a JSON config") from None
            data = tomllib.loads(raw)
        else:
            data = json.loads(raw)
        data.pop("schema", None)
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(data) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "jobs" in data:
        data["jobs"] = tuple(data["jobs"])
    cfg = RunConfig(**data)
    clean = {k: v for k, v in overrides.items() if v is not None}
    if "jobs" in clean:
        clean["jobs"] = tuple(j.strip() for j in clean["jobs"].split(",") if j.strip())
    if clean:
        cfg = replace(cfg, **clean)
    cfg.validate()
    return cfg


def _json_file(payload: dict) -> dict:
    return {"type": "json", "data": payload}


def _text_file(text: str) -> dict:
    return {"type": "text", "data": text}


def _compute_job(cfg: RunConfig, field: QuadField, job: str, get_vector) -> dict:
    B, P, depth, prec = cfg.bound, cfg.prime_norm_bound, cfg.depth, cfg.prec
    if job == "field":
        payload = stamp(field_info_payload(field, P), bound=B, primes=P, depth=depth, prec=prec)
        return {"field.json": _json_file(payload)}
    if job == "drf":
        monoid = rayclass.build_drf(field, parse_ideal(field, cfg.modulus))
        payload = stamp(
            monoid.to_json(), bound=monoid.enumeration_bound, primes=P, depth=depth, prec=prec
        )
        return {"drf.json": _json_file(payload)}
    if job == "vector":
        xi = get_vector()
        payload = stamp(xi.to_json(), bound=B, primes=P, depth=depth, prec=prec)
        payload["family"] = cfg.family
        return {"vector.json": _json_file(payload), "vector.csv": _text_file(_vector_csv(xi))}
    if job == "orbit":
        monoid = witt.orbit_monoid([get_vector()], P)
        payload = stamp(monoid.to_json(), bound=B, primes=P, depth=depth, prec=prec)
        return {"orbit.json": _json_file(payload)}
    if job == "dfao":
        machine = automata.minimize(automata.dfao_from_witt([get_vector()], P))
        payload = stamp(machine.to_json(), bound=B, primes=P, depth=depth, prec=prec)
        return {
            "dfao.json": _json_file(payload),
            "dfao.dot": _text_file(automata.export_dot(machine)),
        }
    if job == "bridy":
        rep = automata.check_bridy([get_vector()], P)
        payload = stamp(rep.to_json(), bound=B, primes=P, depth=depth, prec=prec)
        return {"bridy.json": _json_file(payload)}
    if job == "components":
        rep = witt.component_report(get_vector(), P, dmax=cfg.dmax)
        payload = stamp(rep.to_json(), bound=B, primes=P, depth=depth, prec=prec)
        return {"components.json": _json_file(payload)}
    if job == "classpoly":
        payload = stamp(
            classpoly_payload(algrec.class_polynomial(cfg.d, prec)),
            bound=B,
            primes=P,
            depth=depth,
            prec=prec,
        )
        return {"classpoly.json": _json_file(payload)}
    if job == "certify":
        rep = algrec.certify_vector(get_vector(), dmax=cfg.dmax)
        payload = stamp(certify_payload(rep), bound=B, primes=P, depth=depth, prec=prec)
        return {"certify.json": _json_file(payload)}
    if job == "check":
        payload = stamp(
            modularity_check(field, cfg.level, B, prec), bound=B, primes=P, depth=depth, prec=prec
        )
        return {"check.json": _json_file(payload)}
    raise UsageError(f"unknown job {job!r}")


def _cache_load(cache_dir: Path, key: str):
    path = cache_dir / f"{key}.json"
    if not path.exists():
        return None
    data = json.loads(path.read_text())
    files = data.get("files")
    if data.get("key") != key or files is None or _sha256(files) != data.get("files_sha256"):
        raise UsageError(f"cache entry {path} fails its checksum; delete the poisoned file")
    return files


def _cache_store(cache_dir: Path, key: str, files: dict) -> None:
    cache_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "schema": "wittkit/cache/1",
        "key": key,
        "files_sha256": _sha256(files),
        "files": files,
    }
    (cache_dir / f"{key}.json").write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def run_pipeline(cfg: RunConfig) -> dict:
    cfg.validate()
    field = parse_field(cfg.d)
    out_root = Path(cfg.out_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    cache_dir = Path(cfg.cache_dir) if cfg.cache_dir else None
    cfg_hash = _sha256(cfg.canonical())

    box: dict = {}

    def get_vector() -> witt.WittVector:
        if "xi" not in box:
            fam = parse_family(field, cfg.family)
            box["xi"] = modular.modular_vector(fam, field, cfg.bound, cfg.prec)
        return box["xi"]

    hits, misses = [], []
    artifacts: dict[str, list[str]] = {}
    for job in cfg.jobs:
        key = _sha256({"v": 1, "job": job, "config": cfg.canonical()})
        files = _cache_load(cache_dir, key) if cache_dir else None
        if files is None:
            files = _compute_job(cfg, field, job, get_vector)
            for entry in files.values():
                if entry["type"] == "json":
                    entry["data"]["config_sha256"] = cfg_hash
            if cache_dir:
                _cache_store(cache_dir, key, files)
            misses.append(job)
        else:
            hits.append(job)
        paths = []
        for rel in sorted(files):
            entry = files[rel]
            path = out_root / rel
            if entry["type"] == "json":
                path.write_text(json.dumps(entry["data"], sort_keys=True, indent=2) + "\n")
            else:
                path.write_text(entry["data"])
            paths.append(str(path))
        artifacts[job] = paths
    return {
        "schema": "wittkit/pipeline/1",
        "config_sha256": cfg_hash,
        "out_dir": str(out_root),
        "artifacts": artifacts,
        "cache_hits": hits,
        "cache_misses": misses,
    }


def cmd_pipeline(args) -> int:
    overrides = {
        "d": args.d,
        "bound": args.bound,
        "prime_norm_bound": args.primes,
        "depth": args.depth,
        "prec": args.prec,
        "level": args.level,
        "modulus": args.modulus,
        "family": args.family,
        "dmax": args.dmax,
        "jobs": args.jobs,
        "out_dir": args.out_dir,
        "cache_dir": args.cache_dir,
    }
    cfg = load_config(args.config, overrides)
    summary = run_pipeline(cfg)
    _emit(summary, args.out)
    failed = False
    for paths in summary["artifacts"].values():
        for p in paths:
            if not p.endswith(".json"):
                continue
            data = json.loads(Path(p).read_text())
            for flag in ("passed", "equal", "ok"):
                if data.get(flag) is False:
                    failed = True
    return EXIT_CHECK_FAILED if failed else EXIT_PASS


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wittkit",
        description="ray class monoids, truncated Witt vectors, automata, modular vectors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="inspect a base field")
    fsub = p.add_subparsers(dest="action", required=True)
    q = fsub.add_parser("info", help="discriminant, class group, units, small primes")
    q.add_argument("--d", required=True, help="field tag: negative squarefree integer or Q")
    q.add_argument("--primes", type=int, default=20, help="list primes of norm up to this")
    q.add_argument("--out")
    q.set_defaults(func=cmd_field_info)

    p = sub.add_parser("drf", help="ray class monoids")
    dsub = p.add_subparsers(dest="action", required=True)
    q = dsub.add_parser("build", help="build the monoid for a modulus")
    q.add_argument("--d", required=True)
    q.add_argument("--modulus", required=True, help="ideal token, like 2 or 1,1 or 2:0:2")
    q.add_argument("--bound", type=int, default=None, help="ideal enumeration bound")
    q.add_argument("--out")
    q.set_defaults(func=cmd_drf_build)

    p = sub.add_parser("witt", help="vector certificates, orbits, moduli")
    wsub = p.add_subparsers(dest="action", required=True)
    q = wsub.add_parser("verify", help="truncated unit-tower membership certificate")
    q.add_argument("--vector", required=True, help="vector spec or stored-vector JSON file")
    q.add_argument("--depth", type=int, default=2)
    q.add_argument("--primes", type=int, default=23, help="test primes of norm up to this")
    q.add_argument("--out")
    q.set_defaults(func=cmd_witt_verify)
    q = wsub.add_parser("orbit", help="shift-orbit monoid")
    q.add_argument("--vector", required=True)
    q.add_argument("--primes", type=int, default=10)
    q.add_argument("--out")
    q.set_defaults(func=cmd_witt_orbit)
    q = wsub.add_parser("modulus", help="smallest periodicity modulus")
    q.add_argument("--vector", required=True)
    q.add_argument("--candidate-bound", type=int, default=None)
    q.add_argument("--out")
    q.set_defaults(func=cmd_witt_modulus)
    q = wsub.add_parser("cyclic-search", help="exploratory search; asserts nothing")
    q.add_argument("--target-size", type=int, required=True, help="orbit monoid size to look for")
    q.add_argument("--max-den", type=int, default=6)
    q.add_argument("--coeff-bound", type=int, default=2)
    q.add_argument("--limit", type=int, default=200, help="candidates to try")
    q.add_argument("--max-hits", type=int, default=5)
    q.add_argument("--bound", type=int, default=400)
    q.add_argument("--primes", type=int, default=13)
    q.add_argument("--out")
    q.set_defaults(func=cmd_witt_cyclic_search)

    p = sub.add_parser("automata", help="DFAO construction and checks")
    asub = p.add_subparsers(dest="action", required=True)
    for action, help_text in (
        ("build", "orbit-monoid automaton"),
        ("minimize", "Moore-minimized automaton"),
        ("check-bridy", "state complexity vs orbit dimension"),
    ):
        q = asub.add_parser(action, help=help_text)
        q.add_argument("--vector", required=True)
        q.add_argument("--primes", type=int, default=10)
        q.add_argument("--dot", help="also write Graphviz source here")
        q.add_argument("--out")
        q.set_defaults(func=cmd_automata, action=action)

    p = sub.add_parser("modular", help="deformation families at CM points")
    msub = p.add_subparsers(dest="action", required=True)
    q = msub.add_parser("eval", help="evaluate a family on all in-bound ideals")
    q.add_argument("--d", required=True)
    q.add_argument("--family", default="j", help="j, fricke:a1,a2, or char:<ideal>")
    q.add_argument("--bound", type=int, default=40)
    q.add_argument("--prec", type=int, default=120)
    q.add_argument("--out")
    q.set_defaults(func=cmd_modular_eval)

    p = sub.add_parser("algrec", help="exact recognition of numeric values")
    gsub = p.add_subparsers(dest="action", required=True)
    q = gsub.add_parser("minpoly", help="integer relation for one stored component")
    q.add_argument("--value-from", required=True, help="stored-vector JSON file")
    q.add_argument("--index", required=True, help="ideal token")
    q.add_argument("--dmax", type=int, default=8)
    q.add_argument("--out")
    q.set_defaults(func=cmd_algrec_minpoly)
    q = gsub.add_parser("classpoly", help="Hilbert class polynomial from CM values")
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--prec", type=int, default=120)
    q.add_argument("--out")
    q.set_defaults(func=cmd_algrec_classpoly)

    p = sub.add_parser("check", help="modularity desk check")
    p.add_argument("--d", type=int, default=None, help="default: the three standard triples")
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--bound", type=int, default=40)
    p.add_argument("--prec", type=int, default=120)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("pipeline", help="cached artifact set from a config")
    p.add_argument("--config", help="JSON (or TOML on 3.11+) config file")
    p.add_argument("--d", type=int)
    p.add_argument("--bound", type=int)
    p.add_argument("--primes", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--prec", type=int)
    p.add_argument("--level", type=int)
    p.add_argument("--modulus")
    p.add_argument("--family")
    p.add_argument("--dmax", type=int)
    p.add_argument("--jobs", help="comma-separated subset of: " + ", ".join(_ALL_JOBS))
    p.add_argument("--out-dir")
    p.add_argument("--cache-dir")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, InsufficientBoundError, NoRelationError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except WittkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
