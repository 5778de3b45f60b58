"""Finite-type unstable modules and windowed free modules.

Free modules over the classical algebra have basis all admissible words of
excess at most the generator degree applied to generators; over the
integer-indexed algebra the same recipe gives something infinite in every
degree (index-0 chains), so those are only ever materialized on an explicit
window (degree cap, word length cap, index floor) with saturation tracked
by the callers.

The short exact sequence  0 -> F(V) --(1-P^0)--> F(V) --q--> F_0(V) -> 0
is materialized per degree on windows: the first map sends a basis word w.x
to w.x - rewrite(w.P^0).x, the quotient interprets index-0 letters as the
identity and kills words with negative indices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import steenrod as st
from . import tower


@dataclass(frozen=True)
class ModWindow:
    """Window for flavor-B module data: degree cap, word length cap, index floor."""

    D: int
    L: int
    K: int

    def rewrite_window(self):
        # internal rewriting may transiently need larger indices/lengths
        return st.BWindow(K=2 * self.K + 2 * abs(self.D) + 16, L=self.L + 4)


class GradedVS:
    """Finite list of named basis elements per degree."""

    def __init__(self, p, basis):
        self.p = p
        self.basis = {d: tuple(names) for d, names in sorted(basis.items()) if names}
        seen = set()
        for names in self.basis.values():
            for n in names:
                if n in seen:
                    raise ValueError(f"duplicate basis name {n}")
                seen.add(n)

    def degrees(self):
        return sorted(self.basis)

    def dim(self, d):
        return len(self.basis.get(d, ()))

    def total_dim(self):
        return sum(len(v) for v in self.basis.values())

    def items(self):
        for d in sorted(self.basis):
            for n in self.basis[d]:
                yield d, n

    @classmethod
    def single(cls, p, degree, name="x"):
        return cls(p, {degree: (name,)})


# ---------------------------------------------------------------------------
# admissible-word enumeration
# ---------------------------------------------------------------------------

def _first_index_cap(p, excess_cap, word_deg, eps1):
    # excess = 2 p s1 + 2 eps1 - word_deg (odd p), 2 s1 - word_deg (p = 2)
    if p == 2:
        return (excess_cap + word_deg) // 2
    return (excess_cap + word_deg - 2 * eps1) // (2 * p)


def admissible_words_a(p, word_deg, excess_cap, _cache={}):
    """All admissible flavor-A words of the given degree with excess <= cap."""
    key = (p, word_deg, excess_cap)
    if key in _cache:
        return _cache[key]
    out = []
    if word_deg == 0:
        out.append(())
    elif word_deg > 0:

        def tail(deg_left, prev_s):
            # admissible tails after a letter with index prev_s
            if deg_left == 0:
                yield ()
                return
            if p != 2 and deg_left == 1 and prev_s >= 1:
                yield ((1, 0),)  # trailing Bockstein
            for eps in (0, 1) if p != 2 else (0,):
                step = 2 * (p - 1) if p != 2 else 1
                smax = (prev_s - eps) // p
                for s in range(1, smax + 1):
                    d = step * s + eps
                    if d > deg_left:
                        break
                    for rest in tail(deg_left - d, s):
                        yield ((eps, s),) + rest

        for eps1 in (0, 1) if p != 2 else (0,):
            cap = _first_index_cap(p, excess_cap, word_deg, eps1)
            step = 2 * (p - 1) if p != 2 else 1
            for s1 in range(1, cap + 1):
                d = step * s1 + eps1
                if d > word_deg:
                    break
                for rest in tail(word_deg - d, s1):
                    out.append(((eps1, s1),) + rest)
        if p != 2 and word_deg == 1 and excess_cap >= 1:
            out.append(((1, 0),))  # the bare Bockstein
    result = tuple(sorted(out))
    _cache[key] = result
    return result


def admissible_words_b(p, word_deg, excess_cap, length_cap, index_floor, _cache={}):
    """Admissible flavor-B words: degree fixed, excess <= cap, length <= L, indices >= -K."""
    key = (p, word_deg, excess_cap, length_cap, index_floor)
    if key in _cache:
        return _cache[key]
    step = 2 * (p - 1) if p != 2 else 1
    floor = -index_floor
    eps_extra = 1 if p != 2 else 0

    def max_le(cap_s, r):
        # max degree achievable by at most r more letters with index <= cap_s
        total, best, c = 0, 0, cap_s
        for _ in range(r):
            total += step * c + eps_extra
            best = max(best, total)
            c = c // p
        return best

    def min_le(r):
        return min(0, r * step * floor)

    out = []

    def rec(deg_left, prev_s, len_left, acc):
        if deg_left == 0:
            out.append(tuple(acc))
        if len_left <= 0:
            return
        for eps in (0, 1) if p != 2 else (0,):
            smax = (prev_s - eps) // p
            for s in range(floor, smax + 1):
                rem = deg_left - (step * s + eps)
                if rem < min_le(len_left - 1) or rem > max_le(s // p, len_left - 1):
                    continue
                acc.append((eps, s))
                rec(rem, s, len_left - 1, acc)
                acc.pop()

    if word_deg == 0:
        out.append(())
    if length_cap >= 1:
        for eps1 in (0, 1) if p != 2 else (0,):
            cap = _first_index_cap(p, excess_cap, word_deg, eps1)
            for s1 in range(floor, cap + 1):
                rem = word_deg - (step * s1 + eps1)
                if rem < min_le(length_cap - 1) or rem > max_le(s1 // p, length_cap - 1):
                    continue
                rec(rem, s1, length_cap - 1, [(eps1, s1)])
    result = tuple(sorted(set(out)))
    _cache[key] = result
    return result


# ---------------------------------------------------------------------------
# free modules
# ---------------------------------------------------------------------------

def free_a_basis(gens, d, p=2):
    """Ordered basis of the free unstable module on gens in degree d.

    gens: GradedVS or list of (name, degree).  Basis elements are (word, name).
    """
    pairs = _gen_pairs(gens)
    out = []
    for name, n in pairs:
        if d < n:
            continue
        for w in admissible_words_a(p, d - n, n):
            out.append((w, name))
    return tuple(sorted(out, key=lambda t: (t[1], t[0])))


def free_b_basis_window(gens, d, window, p=2):
    """Windowed basis of the flavor-B free module in degree d."""
    pairs = _gen_pairs(gens)
    out = []
    for name, n in pairs:
        for w in admissible_words_b(p, d - n, n, window.L, window.K):
            out.append((w, name))
    return tuple(sorted(out, key=lambda t: (t[1], t[0])))


def _gen_pairs(gens):
    if isinstance(gens, GradedVS):
        return sorted((n, d) for d, n in gens.items())
    return sorted((name, deg) for name, deg in gens)


class FreeAModule:
    """Free unstable module on named generators, derived bases up to D."""

    def __init__(self, p, gens, D):
        self.p = p
        self.gens = tuple(_gen_pairs(gens))
        self.gen_degrees = dict(self.gens)
        self.D = D

    def basis(self, d):
        if d > self.D:
            raise ValueError(f"degree {d} beyond truncation {self.D}")
        return free_a_basis(self.gens, d, self.p)

    def act(self, op, elt):
        return act_free(self.p, st.FLAVOR_A, op, elt, self.gen_degrees)


class FreeBModuleWindow:
    """Windowed free module for the integer-indexed flavor; never global."""

    def __init__(self, p, gens, window: ModWindow):
        self.p = p
        self.gens = tuple(_gen_pairs(gens))
        self.gen_degrees = dict(self.gens)
        self.window = window

    def basis(self, d):
        return free_b_basis_window(self.gens, d, self.window, self.p)

    def act(self, op, elt):
        return act_free(
            self.p, st.FLAVOR_B, op, elt, self.gen_degrees,
            window=self.window.rewrite_window(),
        )


def act_free(p, flavor, op, elt, gen_degrees, window=None):
    """Action on a free module: rewrite composed words, drop excess violations.

    elt is a dict {(word, genname): coeff}; op an OpElement of the same flavor.
    """
    ctx = st.get_context(p, flavor, window)
    out = {}
    for (w, g), c in elt.items():
        n = gen_degrees[g]
        for ow, oc in op.terms.items():
            word = ow + w
            if flavor == st.FLAVOR_A:
                word = st.normalize_word_a(word, p)
                if word is None:
                    continue
            for w2, c2 in ctx.rewrite(word).items():
                if st.excess(w2, p) > n:
                    continue
                key = (w2, g)
                v = (out.get(key, 0) + c * oc * c2) % p
                if v:
                    out[key] = v
                elif key in out:
                    del out[key]
    return out


# ---------------------------------------------------------------------------
# the windowed exact sequence
# ---------------------------------------------------------------------------

def one_minus_p0_window(V, window, d, p=2, length_cap=None):
    """Matrix of x -> x - x.P^0 in degree d, from the length<=L window into length<=L+1.

    Returns (matrix, source_basis, target_basis); the matrix is over F_p with
    rows indexed by the target window basis.
    """
    L = window.L if length_cap is None else length_cap
    src = _window_basis(V, d, window, L, p)
    tgt = _window_basis(V, d, window, L + 1, p)
    tgt_index = {b: i for i, b in enumerate(tgt)}
    ctx = st.get_context(p, st.FLAVOR_B, window.rewrite_window())
    gen_degrees = dict(_gen_pairs(V))
    M = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for j, (w, g) in enumerate(src):
        M[tgt_index[(w, g)], j] = (M[tgt_index[(w, g)], j] + 1) % p
        n = gen_degrees[g]
        for w2, c2 in ctx.rewrite(w + ((0, 0),)).items():
            if st.excess(w2, p) > n:
                continue
            key = (w2, g)
            assert key in tgt_index, f"rewrite left the window: {key}"
            M[tgt_index[key], j] = (M[tgt_index[key], j] - c2) % p
    return M, src, tgt


def _window_basis(V, d, window, L, p):
    pairs = _gen_pairs(V)
    out = []
    for name, n in pairs:
        for w in admissible_words_b(p, d - n, n, L, window.K):
            out.append((w, name))
    return tuple(sorted(out, key=lambda t: (t[1], t[0])))


def quotient_q_window(V, window, d, p=2, length_cap=None):
    """Matrix of the quotient q: windowed F(V) -> F_0(V) in degree d.

    Index-0 letters become the identity, words with a negative index die,
    then rewrite in the classical algebra and filter by excess.
    """
    L = window.L if length_cap is None else length_cap
    src = _window_basis(V, d, window, L, p)
    tgt = free_a_basis(V, d, p)
    tgt_index = {b: i for i, b in enumerate(tgt)}
    ctx = st.get_context(p, st.FLAVOR_A)
    gen_degrees = dict(_gen_pairs(V))
    M = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for j, (w, g) in enumerate(src):
        if any(s < 0 for _, s in w):
            continue
        aw = st.normalize_word_a(w, p)
        if aw is None:
            continue
        n = gen_degrees[g]
        for w2, c2 in ctx.rewrite(aw).items():
            if st.excess(w2, p) > n:
                continue
            M[tgt_index[(w2, g)], j] = (M[tgt_index[(w2, g)], j] + c2) % p
    return M, src, tgt


def exactness_report(V, window, p=2):
    """Windowed exactness checks for 0 -> F(V) -> F(V) -> F_0(V) -> 0.

    Per degree 0..D reports: injectivity of 1-P^0 on the window, q(1-P^0)=0,
    the raw window cokernel dimension (>= the free classical dimension), and
    the stabilized cokernel dimension (rank of the map induced by enlarging
    the length window), with a saturation flag.  Failures are reported, not
    raised.
    """
    report = {"p": p, "window": window, "degrees": {}, "pass": True}
    for d in range(0, window.D + 1):
        M, src, tgt = one_minus_p0_window(V, window, d, p)
        Q, srcq, f0 = quotient_q_window(V, window, d, p, length_cap=window.L + 1)
        assert srcq == tgt
        inj = tower.rank(M, p) == len(src)
        comp_zero = True
        if len(src) and len(f0):
            comp = (Q @ M) % p
            comp_zero = not comp.any()
        raw_coker = len(tgt) - tower.rank(M, p)
        stab, saturated = _stabilized_coker_dim(V, window, d, p, window.L)
        saturated = saturated and window.L >= 1  # a length-0 window proves nothing
        f0_dim = len(f0)
        cell_pass = inj and comp_zero and raw_coker >= f0_dim and stab == f0_dim
        report["degrees"][d] = {
            "source_dim": len(src),
            "target_dim": len(tgt),
            "injective": inj,
            "q_composite_zero": comp_zero,
            "raw_coker": raw_coker,
            "stabilized_coker": stab,
            "free_classical_dim": f0_dim,
            "saturated": saturated,
            "pass": cell_pass,
        }
        report["pass"] = report["pass"] and cell_pass
    return report


def _stabilized_coker_dim(V, window, d, p, L, j_max=None):
    """Eventual image of the window cokernel in ever-deeper length windows.

    Classes that merely chase the window edge die after finitely many
    enlargements (telescopes can take several steps); the rank of the map
    from the length-(L+1) target into the cokernel at length L+j is
    non-increasing in j, and two consecutive equal values are the
    saturation witness.  Returns (rank, saturated).
    """
    j_max = L + 3 if j_max is None else j_max
    tgt1 = _window_basis(V, d, window, L + 1, p)
    if not tgt1:
        return 0, True
    prev = None
    for j in range(1, j_max + 1):
        M2, _, tgt2 = one_minus_p0_window(V, window, d, p, length_cap=L + j)
        idx2 = {b: i for i, b in enumerate(tgt2)}
        incl = np.zeros((len(tgt2), len(tgt1)), dtype=np.int64)
        for jj, b in enumerate(tgt1):
            incl[idx2[b], jj] = 1
        both = np.concatenate([incl, M2], axis=1) if M2.shape[1] else incl
        r = tower.rank(both, p) - tower.rank(M2, p)
        if prev is not None and r == prev:
            return r, True
        prev = r
    return prev, False


# ---------------------------------------------------------------------------
# finite-type modules with explicit action tables
# ---------------------------------------------------------------------------

class FTUnstableModule:
    """Finite-type unstable module over the classical algebra, degrees <= D.

    Action tables map a single-letter operation and a basis name to a linear
    combination of basis names; words act by composing letters.
    """

    def __init__(self, p, D, basis, action):
        self.p = p
        self.D = D
        self.vs = GradedVS(p, basis)
        self.degree_of = {n: d for d, n in self.vs.items()}
        # action: {(eps, i): {name: {name2: coeff}}}
        self.action = {
            letter: {n: dict(col) for n, col in cols.items() if col}
            for letter, cols in action.items()
        }

    def act_letter(self, letter, name):
        eps, i = letter
        if self.p == 2 and eps:
            raise ValueError("no Bockstein at p = 2")
        if eps == 0 and i == 0:
            return {name: 1}
        col = self.action.get((eps, i), {}).get(name, {})
        return dict(col)

    def act_word(self, word, name):
        cur = {name: 1}
        for letter in reversed(word):
            nxt = {}
            for n, c in cur.items():
                for n2, c2 in self.act_letter(letter, n).items():
                    nxt[n2] = (nxt.get(n2, 0) + c * c2) % self.p
            cur = {k: v for k, v in nxt.items() if v}
        return cur

    def act(self, op, elt):
        """Action of an OpElement on a dict {name: coeff}."""
        out = {}
        for w, oc in op.terms.items():
            for n, c in elt.items():
                for n2, c2 in self.act_word(w, n).items():
                    out[n2] = (out.get(n2, 0) + oc * c * c2) % self.p
        return {k: v for k, v in out.items() if v}

    def validate(self):
        """Instability plus every Adem relation instance within the window."""
        problems = []
        p = self.p
        for letter, cols in self.action.items():
            e = (2 * letter[1] + letter[0]) if p != 2 else letter[1]
            for name in cols:
                if e > self.degree_of[name] and cols[name]:
                    problems.append(("instability", letter, name))
        letters = sorted(self.action)
        for e1, a in letters:
            for e2, b in letters:
                if a >= p * b + e2:
                    continue  # admissible adjacency, nothing to check
                repl = st._adem_pair(e1, a, e2, b, p, st.FLAVOR_A)
                for d, name in self.vs.items():
                    dtot = d + st.word_degree(((e1, a), (e2, b)), p)
                    if dtot > self.D:
                        continue
                    lhs = self.act_word(((e1, a), (e2, b)), name)
                    rhs = {}
                    for key, c in repl.items():
                        w = st.normalize_word_a(key, p)
                        if w is None:
                            continue
                        for n2, c2 in self.act_word(w, name).items():
                            rhs[n2] = (rhs.get(n2, 0) + c * c2) % p
                    rhs = {k: v for k, v in rhs.items() if v}
                    if lhs != rhs:
                        problems.append(("adem", (e1, a, e2, b), name, lhs, rhs))
        return problems

    # -- description file ---------------------------------------------------

    def to_text(self):
        lines = [f"field p={self.p}", f"truncation {self.D}"]
        for d, n in self.vs.items():
            lines.append(f"basis {d} {n}")
        for letter in sorted(self.action):
            eps, i = letter
            tag = ("b" if eps else "") + str(i)
            for name in sorted(self.action[letter]):
                col = self.action[letter][name]
                if not col:
                    continue
                terms = " + ".join(
                    (f"{col[n2]}*{n2}" if col[n2] != 1 else n2) for n2 in sorted(col)
                )
                lines.append(f"act {tag} {name} = {terms}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        p = D = None
        basis = {}
        action = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if parts[0] == "field":
                p = int(parts[1].split("=")[1])
            elif parts[0] == "truncation":
                D = int(parts[1])
            elif parts[0] == "basis":
                d = int(parts[1])
                basis.setdefault(d, []).append(parts[2])
            elif parts[0] == "act":
                tag, name, eq = parts[1], parts[2], parts[3]
                assert eq == "="
                eps = 1 if tag.startswith("b") else 0
                i = int(tag[1:] if eps else tag)
                col = {}
                for term in " ".join(parts[4:]).split("+"):
                    term = term.strip()
                    if "*" in term:
                        c, n2 = term.split("*")
                        col[n2.strip()] = int(c)
                    else:
                        col[term] = 1
                action.setdefault((eps, i), {})[name] = col
            else:
                raise ValueError(f"bad line in module description: {raw!r}")
        return cls(p, D, {d: tuple(v) for d, v in basis.items()}, action)
