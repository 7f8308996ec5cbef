#!/usr/bin/env python3
"""Reference external LP backend: `lp_solve_scipy.py model.lp solution.json`.

Reads the LP text format emitted by the levelmatch exporter and solves it
with scipy's HiGHS interface, writing the solver-exchange JSON document.
Useful for cross-checking the bundled backends and for the large
factor-revealing runs.
"""

import json
import math
import sys


def tokenize(text):
    tokens = []
    for line in text.splitlines():
        if line.startswith("\\"):
            if line.startswith("\\ vars:"):
                tokens.append("\\vars")
                tokens.extend(line[7:].split())
                tokens.append("\\endvars")
            continue
        tokens.extend(line.split())
    return tokens


def parse_number(word):
    lowered = word.lower()
    if lowered in ("inf", "+inf"):
        return math.inf
    if lowered == "-inf":
        return -math.inf
    try:
        return float(word)
    except ValueError:
        return None


class Parser:
    SECTION_WORDS = {"subject", "st", "s.t.", "bounds", "end"}

    def __init__(self, text):
        self.tokens = tokenize(text)
        self.pos = 0
        self.names = []
        self.index = {}
        self.bounds = {}

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        word = self.tokens[self.pos]
        self.pos += 1
        return word

    def var(self, name):
        if name not in self.index:
            self.index[name] = len(self.names)
            self.names.append(name)
            self.bounds[name] = (0.0, math.inf)
        return self.index[name]

    def parse_terms(self):
        terms = []
        sign = 1.0
        coef = None
        while self.peek() is not None:
            word = self.peek()
            if word in ("+", "-"):
                self.next()
                sign *= -1.0 if word == "-" else 1.0
                continue
            if word in ("<=", ">=", "=") or word.lower() in self.SECTION_WORDS or word.endswith(":"):
                break
            self.next()
            number = parse_number(word)
            if coef is None and number is not None:
                coef = number
                continue
            terms.append((self.var(word), sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
        return terms

    def parse(self):
        if self.peek() == "\\vars":
            self.next()
            while self.peek() != "\\endvars":
                self.var(self.next())
            self.next()
        sense = self.next().lower()
        if sense in ("maximize", "max"):
            maximize = True
        elif sense in ("minimize", "min"):
            maximize = False
        else:
            raise ValueError(f"expected sense, got {sense}")
        if not self.next().endswith(":"):
            raise ValueError("expected objective label")
        objective = self.parse_terms()

        word = self.next().lower()
        if word == "subject":
            if self.next().lower() != "to":
                raise ValueError("expected To")
        elif word not in ("st", "s.t."):
            raise ValueError("expected Subject To")

        rows = []
        while self.peek() is not None and self.peek().lower() not in ("bounds", "end"):
            label = self.next()
            if not label.endswith(":"):
                raise ValueError(f"expected row label, got {label}")
            terms = self.parse_terms()
            rel = self.next()
            rhs = parse_number(self.next())
            rows.append((terms, rel, rhs))

        if self.peek() is not None and self.peek().lower() == "bounds":
            self.next()
            while self.peek() is not None and self.peek().lower() != "end":
                first = parse_number(self.peek())
                if first is not None:
                    self.next()
                    assert self.next() == "<="
                    name = self.next()
                    assert self.next() == "<="
                    upper = parse_number(self.next())
                    self.var(name)
                    self.bounds[name] = (first, upper)
                else:
                    name = self.next()
                    self.var(name)
                    word = self.next()
                    lo, up = self.bounds[name]
                    if word.lower() == "free":
                        self.bounds[name] = (-math.inf, math.inf)
                    elif word == "=":
                        value = parse_number(self.next())
                        self.bounds[name] = (value, value)
                    elif word == "<=":
                        self.bounds[name] = (lo, parse_number(self.next()))
                    elif word == ">=":
                        self.bounds[name] = (parse_number(self.next()), up)
                    else:
                        raise ValueError(f"malformed bound near {word}")
        return maximize, objective, rows


def main():
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    with open(sys.argv[1], "r", encoding="utf-8") as handle:
        text = handle.read()
    parser = Parser(text)
    maximize, objective, rows = parser.parse()

    import numpy as np
    from scipy.optimize import linprog

    n = len(parser.names)
    c = np.zeros(n)
    for var, coef in objective:
        c[var] += coef
    if maximize:
        c = -c

    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for terms, rel, rhs in rows:
        dense = np.zeros(n)
        for var, coef in terms:
            dense[var] += coef
        if rel == "<=":
            a_ub.append(dense)
            b_ub.append(rhs)
        elif rel == ">=":
            a_ub.append(-dense)
            b_ub.append(-rhs)
        else:
            a_eq.append(dense)
            b_eq.append(rhs)

    bounds = [parser.bounds[name] for name in parser.names]
    result = linprog(
        c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
    )

    status_map = {0: "optimal", 1: "limit", 2: "infeasible", 3: "unbounded"}
    status = status_map.get(result.status, "limit")
    doc = {"status": status, "objective": 0.0, "values": {}}
    if status == "optimal":
        doc["objective"] = float(-result.fun if maximize else result.fun)
        doc["values"] = {name: float(result.x[i]) for i, name in enumerate(parser.names)}
    with open(sys.argv[2], "w", encoding="utf-8") as handle:
        json.dump(doc, handle, indent=2)
        handle.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
