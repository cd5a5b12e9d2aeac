"""Reader and writer for the ``.bnet`` text format.

::

    # comment
    var <name> <cardinality> <value-name>...
    cpt <child> | <parent>...
    <row of <cardinality> decimals>     # one per parent instantiation, last parent fastest

All ``var`` lines may appear anywhere before the ``cpt`` block that uses them.
"""
from .errors import NetworkError, ParseError
from .network import Cpt, Network, Variable


def _tokens(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_network(text):
    variables = []
    by_name = {}
    pending = []  # (lineno, child, parents, rows)
    current = None
    for lineno, toks in _tokens(text):
        head = toks[0]
        if head == "var":
            if current is not None:
                _finish(current, variables)
                pending.append(current)
                current = None
            if len(toks) < 3:
                raise ParseError("expected 'var <name> <cardinality> <value-name>...'", lineno)
            name = toks[1]
            try:
                card = int(toks[2])
            except ValueError:
                raise ParseError(f"bad cardinality {toks[2]!r}", lineno) from None
            values = tuple(toks[3:])
            if card < 2:
                raise ParseError(f"cardinality of {name!r} must be >= 2", lineno)
            if len(values) != card:
                raise ParseError(f"{name!r} declares {card} values but names {len(values)}", lineno)
            if len(set(values)) != card:
                raise ParseError(f"duplicate value names for {name!r}", lineno)
            if name in by_name:
                raise ParseError(f"variable {name!r} declared twice", lineno)
            by_name[name] = len(variables)
            variables.append(Variable(len(variables), name, card, values))
        elif head == "cpt":
            if current is not None:
                _finish(current, variables)
                pending.append(current)
            if len(toks) < 3 or toks[2] != "|":
                raise ParseError("expected 'cpt <child> | <parent>...'", lineno)
            names = [toks[1]] + toks[3:]
            for nm in names:
                if nm not in by_name:
                    raise ParseError(f"unknown variable {nm!r}", lineno)
            ids = [by_name[nm] for nm in names]
            current = {"line": lineno, "child": ids[0], "parents": ids[1:], "rows": []}
        else:
            if current is None:
                raise ParseError(f"unexpected token {head!r}", lineno)
            try:
                row = [float(t) for t in toks]
            except ValueError:
                raise ParseError(f"non-numeric CPT row {' '.join(toks)!r}", lineno) from None
            card = variables[current["child"]].cardinality
            if len(row) != card:
                raise ParseError(f"row has {len(row)} entries, expected {card}", lineno)
            current["rows"].append(row)
    if current is not None:
        _finish(current, variables)
        pending.append(current)

    cpts = [Cpt(p["child"], p["parents"], p["rows"]) for p in pending]
    try:
        return Network(variables, cpts)
    except NetworkError as exc:
        line = None
        for p in pending:
            if repr(variables[p["child"]].name) in str(exc):
                line = p["line"]
                break
        raise ParseError(str(exc), line) from None


def _finish(block, variables):
    expected = 1
    for p in block["parents"]:
        expected *= variables[p].cardinality
    got = len(block["rows"])
    if got != expected:
        raise ParseError(f"CPT of {variables[block['child']].name!r} has {got} rows, "
                         f"expected {expected}", block["line"])


def serialize_network(net):
    lines = []
    for var in net.variables:
        lines.append(f"var {var.name} {var.cardinality} {' '.join(var.value_names)}")
    for cpt in net.cpts:
        parents = " ".join(net.name(p) for p in cpt.parents)
        lines.append(f"cpt {net.name(cpt.child)} |" + (f" {parents}" if parents else ""))
        for row in cpt.table:
            lines.append(" ".join(format(float(x), ".17g") for x in row))
    return "\n".join(lines) + "\n"


def load_network(path):
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())
