"""Dispatch for the four compilers and rebuilding of constructed machines."""
from __future__ import annotations

from .builtins import builtin
from .machine import CatSpec, IatSpec, MachineParseError, SeqTransducerSpec, TimeComplexity

SOURCES = ("iat", "cat", "sfst", "dpdt")


def compile_machine(source_kind: str, spec, ti: str = "rt", to: str = "rt", sv_check_len: int | None = 10):
    """Compile ``spec`` (an IAT, CAT, FST or PDT) into the other model.

    ``ti``/``to`` give the time complexities of an IAT source;
    ``sv_check_len`` bounds the single-valuedness check of an FST source.
    """
    if source_kind == "iat":
        from .iat_bridge import compile_iat_to_cat

        _expect(spec, IatSpec, source_kind)
        return compile_iat_to_cat(spec, TimeComplexity.parse(ti), TimeComplexity.parse(to))
    if source_kind == "cat":
        from .iat_bridge import compile_cat_to_iat

        _expect(spec, CatSpec, source_kind)
        return compile_cat_to_iat(spec)
    if source_kind == "sfst":
        from .sfst import compile_sfst_to_cat

        _expect(spec, SeqTransducerSpec, source_kind)
        return compile_sfst_to_cat(spec, sv_check_len=sv_check_len or None)
    if source_kind == "dpdt":
        from .dpdt import compile_dpdt_to_cat

        _expect(spec, SeqTransducerSpec, source_kind)
        return compile_dpdt_to_cat(spec)
    raise ValueError(f"unknown source kind {source_kind!r}; choose from {', '.join(SOURCES)}")


def _expect(spec, cls, kind):
    if not isinstance(spec, cls):
        raise TypeError(f"--from {kind} needs a {cls.__name__}, got {type(spec).__name__}")


def compile_report(machine) -> dict:
    """Constants and bounds recorded by a compiler."""
    info = machine.info
    comp = info.get("construction", {}).get("compiler")
    report = {"compiler": comp, "name": machine.name}
    if comp == "iat":
        report.update(K=info["K"], g=info["g"])
    elif comp == "dpdt":
        k = info["constants"]
        report.update(k1=k.k1, k2=k.k2, k=k.k, c=info["c"])
    elif comp == "sfst":
        report.update(dfa_states=len(info["dfa"].states), productions=len(info["grammar"].productions))
    return report


def rebuild(kind: str, construction: dict):
    """Rebuild a machine from its serialized construction record."""
    from .machine import machine_from_dict

    if not isinstance(construction, dict):
        raise MachineParseError("construction must be an object")
    if "builtin" in construction:
        try:
            machine = builtin(construction["builtin"])
        except KeyError as exc:
            raise MachineParseError(str(exc)) from None
    else:
        comp = construction.get("compiler")
        if comp not in SOURCES or "source" not in construction:
            raise MachineParseError(f"unknown construction record {construction!r}")
        source = machine_from_dict(construction["source"])
        if comp == "iat":
            machine = compile_machine("iat", source, construction.get("ti", "rt"), construction.get("to", "rt"))
        elif comp == "sfst":
            machine = compile_machine("sfst", source, sv_check_len=None)
        else:
            machine = compile_machine(comp, source)
    got = "cat" if isinstance(machine, CatSpec) else "iat"
    if kind != got:
        raise MachineParseError(f"construction builds a {got}, document says {kind!r}")
    return machine
