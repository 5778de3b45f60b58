"""Free unstable algebras with degree-truncated monomial bases.

The free unstable algebra on a graded set of generators is the free
graded-commutative algebra on the polynomial generators: admissible words
applied to generators, subject to excess strictly below the generator
degree (plus, at odd primes, Bockstein-led words of excess exactly the
degree).  The top operation realizes the p-th power, so words of excess
equal to the degree that start with a power operation are rewritten to
p-th powers of shorter classes.

Monomials are tuples ((polygen_index, exponent), ...) sorted by index;
odd-degree polygens square to zero at odd primes.  All bases, action and
multiplication are truncated at a fixed top degree D and memoized; the
data never mutates after construction, so instances can be shared freely.
"""

from __future__ import annotations

import itertools

from . import steenrod as st
from .unstable_modules import FTUnstableModule, GradedVS, admissible_words_a


class DegreeCapExceeded(Exception):
    """A product or operation left the configured degree truncation."""


def _polygen_words(p, n, max_word_deg):
    """Words indexing polynomial generators on a degree-n generator.

    Excess < n, plus (odd p) Bockstein-led words of excess exactly n;
    excess-n power-led words are p-th powers, not generators.
    """
    out = []
    for wd in range(0, max_word_deg + 1):
        for w in admissible_words_a(p, wd, n):
            e = st.excess(w, p)
            if e < n or (p != 2 and e == n and w and w[0][0] == 1):
                out.append(w)
    return out


class MonomialBasis:
    """Graded-commutative monomial bases on weighted letters, truncated at D.

    Monomials are tuples ((letter_index, exponent), ...) sorted by index;
    at odd primes odd-degree letters square to zero and contribute Koszul
    signs under multiplication.
    """

    def __init__(self, p, degrees, D):
        self.p = p
        self.D = D
        self.pg_degree = tuple(degrees)
        self._basis = self._enumerate_basis()
        self.index = {}
        for d in sorted(self._basis):
            for i, m in enumerate(self._basis[d]):
                self.index[m] = (d, i)

    def _enumerate_basis(self):
        # letters are sorted by degree, so the scan can stop early; recursion
        # depth is the number of distinct letters in a monomial, not the
        # alphabet size
        by_degree = {}
        n = len(self.pg_degree)

        def rec(start, deg_left, deg_used, acc):
            by_degree.setdefault(deg_used, []).append(tuple(acc))
            for j in range(start, n):
                d = self.pg_degree[j]
                if d > deg_left:
                    break
                emax = deg_left // d
                if self.p != 2 and d % 2 == 1:
                    emax = min(emax, 1)
                for e in range(1, emax + 1):
                    acc.append((j, e))
                    rec(j + 1, deg_left - d * e, deg_used + d * e, acc)
                    acc.pop()

        rec(0, self.D, 0, [])
        return {d: tuple(sorted(ms)) for d, ms in by_degree.items()}

    def basis(self, d):
        """Ordered monomial basis in degree d (degree 0 is the unit)."""
        return self._basis.get(d, ())

    def hilbert(self, D=None):
        D = self.D if D is None else D
        return tuple(len(self.basis(d)) for d in range(0, D + 1))

    def monomial_degree(self, m):
        return sum(self.pg_degree[i] * e for i, e in m)

    def reduced_basis_items(self):
        for d in range(1, self.D + 1):
            for m in self.basis(d):
                yield d, m

    def mul_monomials(self, m1, m2):
        """Product of two basis monomials: (coeff, monomial) or None when zero."""
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        deg = self.monomial_degree(m1) + self.monomial_degree(m2)
        if deg > self.D:
            raise DegreeCapExceeded(f"product degree {deg} exceeds truncation {self.D}")
        sign = 1
        if self.p != 2:
            # Koszul sign from interleaving odd-degree factors
            odd1 = [i for i, e in m1 if self.pg_degree[i] % 2]
            inversions = 0
            for i2, _ in m2:
                if self.pg_degree[i2] % 2:
                    inversions += sum(1 for i1 in odd1 if i1 > i2)
            if inversions % 2:
                sign = -1
        merged = {}
        for i, e in itertools.chain(m1, m2):
            merged[i] = merged.get(i, 0) + e
            if self.p != 2 and self.pg_degree[i] % 2 and merged[i] > 1:
                return None
        mono = tuple(sorted(merged.items()))
        return sign % self.p, mono

    def mul(self, v1, v2):
        """Product of dict-vectors {monomial: coeff}."""
        out = {}
        for m1, c1 in v1.items():
            for m2, c2 in v2.items():
                r = self.mul_monomials(m1, m2)
                if r is None:
                    continue
                s, m = r
                c = (out.get(m, 0) + s * c1 * c2) % self.p
                if c:
                    out[m] = c
                elif m in out:
                    del out[m]
        return out

    def power(self, v, e):
        out = {(): 1}
        for _ in range(e):
            out = self.mul(out, v)
        return out


class FreeUnstableAlgebra(MonomialBasis):
    """Degree-truncated free unstable algebra on named generators (degrees >= 1)."""

    def __init__(self, p, gens, D):
        self.gens = tuple(sorted((n, int(d)) for n, d in _gen_list(gens)))
        for n, d in self.gens:
            if d < 1:
                raise ValueError("generators must sit in degrees >= 1")
        self.gen_degree = dict(self.gens)
        # polynomial generators, ordered by (degree, generator, word)
        pgs = []
        for name, n in self.gens:
            for w in _polygen_words(p, n, D - n):
                pgs.append((st.word_degree(w, p) + n, name, w))
        pgs.sort()
        self.polygens = tuple((w, name) for _, name, w in pgs)
        self.pg_index = {pg: i for i, pg in enumerate(self.polygens)}
        super().__init__(p, (d for d, _, _ in pgs), D)
        self._op_memo = {}
        self._sq_pow_memo = {}
        self._ctx = st.get_context(p, st.FLAVOR_A)

    # -- operations ------------------------------------------------------------

    def _classify_word(self, word, gen):
        """Value of an admissible flavor-A word on a generator, as a vector."""
        p, n = self.p, self.gen_degree[gen]
        e = st.excess(word, p)
        if e > n:
            return {}
        key = (word, gen)
        if e < n or (p != 2 and e == n and word and word[0][0] == 1):
            if key not in self.pg_index:
                raise DegreeCapExceeded(f"class {key} beyond truncation {self.D}")
            return {((self.pg_index[key], 1),): 1}
        # excess == n with a power-operation lead: p-th power of the tail class
        tail = word[1:]
        inner = self._resolve_word(tail, gen)
        return self._pth_power(inner)

    def _pth_power(self, v):
        out = {}
        for m, c in v.items():
            if self.p != 2 and any(self.pg_degree[i] % 2 for i, _ in m):
                continue
            deg = self.monomial_degree(m) * self.p
            if deg > self.D:
                raise DegreeCapExceeded(f"p-th power degree {deg} exceeds truncation")
            mono = tuple((i, e * self.p) for i, e in m)
            out[mono] = (out.get(mono, 0) + c) % self.p
        return {k: v2 for k, v2 in out.items() if v2}

    def _resolve_word(self, word, gen):
        """Admissible-or-not word applied to a generator."""
        out = {}
        for w2, c2 in self._ctx.rewrite(word).items():
            for m, c in self._classify_word(w2, gen).items():
                v = (out.get(m, 0) + c * c2) % self.p
                if v:
                    out[m] = v
                elif m in out:
                    del out[m]
        return out

    def op_on_polygen(self, eps, s, i):
        """Single letter beta^eps P^s on the i-th polynomial generator."""
        key = (eps, s, i)
        hit = self._op_memo.get(key)
        if hit is not None:
            return dict(hit)
        word, gen = self.polygens[i]
        if eps == 0 and s == 0:
            out = {((i, 1),): 1}
        elif eps == 1 and s == 0:
            merged = st.normalize_word_a(((1, 0),) + word, self.p)
            out = {} if merged is None else self._resolve_word(merged, gen)
        else:
            pg_deg = self.pg_degree[i]
            opdeg = st.letter_degree((eps, s), self.p)
            top = pg_deg if self.p == 2 else pg_deg // 2
            if eps == 0 and self.p == 2 and s == pg_deg:
                out = {((i, 2),): 1}  # top square directly
            elif eps == 0 and self.p != 2 and 2 * s == pg_deg:
                out = self._pth_power({((i, 1),): 1})
            elif (s > top) if eps == 0 else False:
                out = {}
            elif pg_deg + opdeg > self.D:
                raise DegreeCapExceeded("operation image beyond truncation")
            else:
                w = st.normalize_word_a(((eps, s),) + word, self.p)
                out = {} if w is None else self._resolve_word(w, gen)
        self._op_memo[key] = out
        return dict(out)

    def _power_op_part(self, i, e, a):
        """Degree-raise-a part of P (total) on the e-th power of polygen i (no Bockstein)."""
        key = (i, e, a)
        hit = self._sq_pow_memo.get(key)
        if hit is not None:
            return dict(hit)
        step = 1 if self.p == 2 else 2 * (self.p - 1)
        if a % step:
            out = {}
        elif e == 0:
            out = {(): 1} if a == 0 else {}
        else:
            out = {}
            pg_deg = self.pg_degree[i]
            top = pg_deg if self.p == 2 else pg_deg // 2
            for s in range(0, min(top, a // step) + 1):
                u = self.op_on_polygen(0, s, i)
                if not u:
                    continue
                rest = self._power_op_part(i, e - 1, a - s * step)
                if not rest:
                    continue
                for m, c in self.mul(u, rest).items():
                    v = (out.get(m, 0) + c) % self.p
                    if v:
                        out[m] = v
                    elif m in out:
                        del out[m]
        self._sq_pow_memo[key] = out
        return dict(out)

    def _power_op_mono(self, s, mono):
        """P^s (Sq^s at p=2) on a basis monomial, by the Cartan formula."""
        step = 1 if self.p == 2 else 2 * (self.p - 1)
        if not mono:
            return {(): 1} if s == 0 else {}
        (i, e), rest = mono[0], mono[1:]
        out = {}
        for a in range(0, s * step + 1, step):
            u = self._power_op_part(i, e, a)
            if not u:
                continue
            v = self._power_op_mono(s - a // step, rest)
            if not v:
                continue
            for m, c in self.mul(u, v).items():
                w = (out.get(m, 0) + c) % self.p
                if w:
                    out[m] = w
                elif m in out:
                    del out[m]
        return out

    def _beta_mono(self, mono):
        """Bockstein on a basis monomial (derivation with Koszul signs)."""
        if not mono:
            return {}
        (i, e), rest = mono[0], mono[1:]
        out = {}
        d_i = self.pg_degree[i]
        # beta(y^e) = e y^{e-1} beta(y): odd-degree y has e = 1
        by = self.op_on_polygen(1, 0, i)
        if by and e % self.p:
            head_rest = {((i, e - 1),): 1} if e > 1 else {(): 1}
            part = self.mul(self.mul(by, head_rest), {rest: 1})
            for m, c in part.items():
                out[m] = (out.get(m, 0) + e * c) % self.p
        # pass beta over y^e with the sign (-1)^{e|y|}
        brest = self._beta_mono(rest)
        if brest:
            sign = -1 if (self.p != 2 and (d_i * e) % 2) else 1
            part = self.mul({((i, e),): 1}, brest)
            for m, c in part.items():
                out[m] = (out.get(m, 0) + sign * c) % self.p
        return {k: v for k, v in out.items() if v}

    def act_letter(self, eps, s, vec):
        out = {}
        for mono, c in vec.items():
            img = self._power_op_mono(s, mono)
            if eps:
                img2 = {}
                for m, c2 in img.items():
                    for m2, c3 in self._beta_mono(m).items():
                        img2[m2] = (img2.get(m2, 0) + c2 * c3) % self.p
                img = img2
            for m, c2 in img.items():
                v = (out.get(m, 0) + c * c2) % self.p
                if v:
                    out[m] = v
                elif m in out:
                    del out[m]
        return out

    def act_word(self, word, vec):
        for eps, s in reversed(word):
            vec = self.act_letter(eps, s, vec)
        return vec

    def act(self, op, vec):
        """Action of an OpElement (flavor A) on a dict-vector."""
        out = {}
        for w, oc in op.terms.items():
            img = self.act_word(w, vec)
            for m, c in img.items():
                v = (out.get(m, 0) + oc * c) % self.p
                if v:
                    out[m] = v
                elif m in out:
                    del out[m]
        return out

    def gen_vector(self, name):
        return {((self.pg_index[((), name)], 1),): 1}


def _gen_list(gens):
    if isinstance(gens, GradedVS):
        return [(n, d) for d, n in gens.items()]
    return list(gens)


def free_unstable_algebra(p, gens, D):
    return FreeUnstableAlgebra(p, gens, D)


def alg_basis(A, d):
    return A.basis(d)


def hilbert(A, D=None):
    return A.hilbert(D)


# ---------------------------------------------------------------------------
# finite-type algebras (module + product tables)
# ---------------------------------------------------------------------------

class FTAlgebra:
    """Finite-type unstable algebra: an FT module plus sparse product tables.

    Products are stored on reduced basis pairs; the unit is implicit.  Used
    for built-in space cohomologies at the bottom of resolutions.
    """

    def __init__(self, module: FTUnstableModule, products):
        self.module = module
        self.p = module.p
        self.D = module.D
        # products: {(name1, name2): {name: coeff}} for name1 <= name2
        self.products = {}
        for (a, b), col in products.items():
            key = (a, b) if a <= b else (b, a)
            if a > b and self.p != 2:
                da, db = module.degree_of[a], module.degree_of[b]
                if (da * db) % 2:
                    col = {n: (-c) % self.p for n, c in col.items()}
            self.products[key] = {n: c % self.p for n, c in col.items() if c % self.p}

    def mul_names(self, a, b):
        da, db = self.module.degree_of[a], self.module.degree_of[b]
        if da + db > self.D:
            raise DegreeCapExceeded("product beyond truncation")
        key, sign = ((a, b), 1) if a <= b else ((b, a), 1)
        if a > b and self.p != 2 and (da * db) % 2:
            sign = -1
        col = self.products.get(key, {})
        return {n: (sign * c) % self.p for n, c in col.items()}

    def mul(self, v1, v2):
        out = {}
        for a, c1 in v1.items():
            for b, c2 in v2.items():
                for n, c in self.mul_names(a, b).items():
                    v = (out.get(n, 0) + c1 * c2 * c) % self.p
                    if v:
                        out[n] = v
                    elif n in out:
                        del out[n]
        return out

    def act_word(self, word, vec):
        out = {}
        for n, c in vec.items():
            for n2, c2 in self.module.act_word(word, n).items():
                v = (out.get(n2, 0) + c * c2) % self.p
                if v:
                    out[n2] = v
                elif n2 in out:
                    del out[n2]
        return out

    def basis(self, d):
        return self.module.vs.basis.get(d, ())

    def graded_vs(self):
        return self.module.vs

    # -- description file: the module format plus product lines -------------

    def to_text(self):
        lines = [self.module.to_text().rstrip("\n")]
        for a, b in sorted(self.products):
            col = self.products[(a, b)]
            if not col:
                lines.append(f"prod {a} {b} = 0")
                continue
            terms = " + ".join(
                (f"{col[n]}*{n}" if col[n] != 1 else n) for n in sorted(col)
            )
            lines.append(f"prod {a} {b} = {terms}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        module_lines = []
        products = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line.startswith("prod "):
                module_lines.append(raw)
                continue
            parts = line.split()
            a, b, eq = parts[1], parts[2], parts[3]
            assert eq == "="
            rhs = " ".join(parts[4:])
            col = {}
            if rhs != "0":
                for term in rhs.split("+"):
                    term = term.strip()
                    if "*" in term:
                        c, n = term.split("*")
                        col[n.strip()] = int(c)
                    else:
                        col[term] = 1
            products[(a, b)] = col
        module = FTUnstableModule.from_text("\n".join(module_lines))
        return cls(module, products)


# ---------------------------------------------------------------------------
# algebra maps and the monad structure
# ---------------------------------------------------------------------------

def extend_algebra_map(source: FreeUnstableAlgebra, target, gen_images):
    """Multiplicative, operation-compatible extension of generator images.

    target implements mul/act_word over dict-vectors; gen_images maps each
    module generator name of the source to a target vector.  Returns a dict
    {source basis monomial: target vector} covering every reduced degree.
    """
    pg_images = []
    for w, g in source.polygens:
        pg_images.append(target.act_word(w, gen_images[g]))
    pow_memo = {}

    def pg_power(i, e):
        key = (i, e)
        if key not in pow_memo:
            if e == 1:
                pow_memo[key] = pg_images[i]
            else:
                pow_memo[key] = target.mul(pg_power(i, e - 1), pg_images[i])
        return pow_memo[key]

    out = {}
    for d, m in source.reduced_basis_items():
        vec = None
        for i, e in m:
            part = pg_power(i, e)
            vec = part if vec is None else target.mul(vec, part)
        out[m] = vec if vec is not None else {}
    return out


class AlgebraMap:
    """Map of unstable algebras given on the source's polynomial generators."""

    def __init__(self, source: FreeUnstableAlgebra, target, pg_images):
        self.source = source
        self.target = target
        self.pg_images = pg_images  # list of target vectors, one per source polygen

    @classmethod
    def from_generator_images(cls, source, target, gen_images):
        pgs = [target.act_word(w, gen_images[g]) for w, g in source.polygens]
        return cls(source, target, pgs)

    def value_on_monomial(self, m):
        vec = {(): 1} if hasattr(self.target, "pg_index") else {}
        first = True
        for i, e in m:
            part = self.pg_images[i]
            cur = part
            for _ in range(e - 1):
                cur = self.target.mul(cur, part)
            vec = cur if first else self.target.mul(vec, cur)
            first = False
        if first:
            raise ValueError("unit monomial has no reduced image")
        return vec

    def matrix(self, d, target_basis):
        """Matrix on degree-d bases (rows = target basis elements)."""
        import numpy as np

        rows = {b: i for i, b in enumerate(target_basis)}
        src = self.source.basis(d)
        M = np.zeros((len(target_basis), len(src)), dtype=np.int64)
        for j, m in enumerate(src):
            for b, c in self.value_on_monomial(m).items():
                M[rows[b], j] = c % self.source.p
        return M

    def validate(self, letters=None):
        """Check operation-compatibility on each polygen for the given letters.

        Returns a list of violations (letter, polygen index) with both sides.
        """
        p = self.source.p
        letters = letters or ([(0, s) for s in range(1, 5)] + ([(1, 0)] if p != 2 else []))
        bad = []
        for i, (w, g) in enumerate(self.source.polygens):
            for eps, s in letters:
                d_img = self.source.pg_degree[i] + st.letter_degree((eps, s), p)
                if d_img > min(self.source.D, getattr(self.target, "D", self.source.D)):
                    continue
                lhs_vec = self.source.op_on_polygen(eps, s, i)
                lhs = {}
                for m, c in lhs_vec.items():
                    for b, c2 in (self.value_on_monomial(m) if m else {}).items():
                        lhs[b] = (lhs.get(b, 0) + c * c2) % p
                rhs = self.target.act_word(((eps, s),), self.pg_images[i])
                lhs = {k: v for k, v in lhs.items() if v}
                rhs = {k: v for k, v in rhs.items() if v}
                if lhs != rhs:
                    bad.append(((eps, s), i, lhs, rhs))
        return bad


def monad_unit_matrix(W: GradedVS, A: FreeUnstableAlgebra, d):
    """Matrix of the generator insertion W -> G(W) in degree d."""
    import numpy as np

    src = W.basis.get(d, ())
    tgt = A.basis(d)
    rows = {m: i for i, m in enumerate(tgt)}
    M = np.zeros((len(tgt), len(src)), dtype=np.int64)
    for j, name in enumerate(src):
        mono = ((A.pg_index[((), name)], 1),)
        M[rows[mono], j] = 1
    return M


def monad_mult_images(GG: FreeUnstableAlgebra, G: FreeUnstableAlgebra, name_of_monomial):
    """Evaluation G(G(W)) -> G(W): formal generators evaluate to what they name.

    name_of_monomial maps a generator name of GG to the G-monomial it denotes.
    Returns {GG basis monomial: G vector}.
    """
    gen_images = {name: {mono: 1} for name, mono in name_of_monomial.items()}
    return extend_algebra_map(GG, G, gen_images)
