"""Exact-rational martingales, induced s-gales and counting checks.

A model is evaluated through an explicit *state* that is extended one bit at a
time, so a codec can carry the capital along a long sequence instead of
re-reading the whole prefix for every query.  ``value(w)`` and ``staged(w, t)``
are the plain functional views on top of that.

All capital arithmetic uses :class:`fractions.Fraction`; nothing here rounds.
"""

from __future__ import annotations

import itertools
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterator, Sequence

from .bits import BitString
from .errors import (
    ExhaustiveBoundExceeded,
    MalformedCode,
    ParameterOutOfRange,
    WeightsNotNormalized,
)

EXHAUSTIVE_BOUND = 12

UNIFORM_ID = 0x00
BERNOULLI_ID = 0x01
KT_ID = 0x02
MIXTURE_ID = 0x03
SLOW_FLAG = 0x80

_U32 = struct.Struct("<I")
_HALF = Fraction(1, 2)


def _stage_factor(t: int) -> Fraction:
    return 1 - Fraction(1, 1 << (t + 1))


class MartingaleModel:
    """Strictly positive martingale with a staged lower approximation.

    Subclasses implement :meth:`start`, :meth:`step` and :meth:`capital`.
    Setting ``exchangeable`` promises that the capital (and the staged
    capital) of ``w u`` depends on ``u`` only through its number of ones; the
    codec then ranks admitted strings by counting instead of by tree search.
    ``staged_order`` selects the stage-loop enumeration order in the codec.
    """

    exchangeable = False
    staged_order = False

    def start(self) -> Any:
        raise NotImplementedError

    def step(self, state: Any, bit: str) -> Any:
        raise NotImplementedError

    def capital(self, state: Any) -> Fraction:
        raise NotImplementedError

    def staged_capital(self, state: Any, t: int) -> Fraction:
        return self.capital(state) * _stage_factor(t)

    def to_bytes(self) -> bytes:
        raise NotImplementedError

    def extend(self, state: Any, bits: BitString) -> Any:
        for b in bits:
            state = self.step(state, b)
        return state

    def state_of(self, w: BitString) -> Any:
        return self.extend(self.start(), w)

    def value(self, w: BitString) -> Fraction:
        return self.capital(self.state_of(w))

    def staged(self, w: BitString, t: int) -> Fraction:
        return self.staged_capital(self.state_of(w), t)

    @property
    def initial(self) -> Fraction:
        return self.capital(self.start())

    def ones_profile(self, state: Any, k: int) -> list[Fraction]:
        """Capital after any length-``k`` extension with ``j`` ones, for j = 0..k.

        Only meaningful for exchangeable models.  This fallback walks one
        representative extension per ``j``.
        """
        return [self.capital(self.extend(state, "1" * j + "0" * (k - j)))
                for j in range(k + 1)]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MartingaleModel) and self.to_bytes() == other.to_bytes()

    def __hash__(self) -> int:
        return hash(self.to_bytes())


class UniformModel(MartingaleModel):
    exchangeable = True

    def start(self) -> None:
        return None

    def step(self, state: None, bit: str) -> None:
        return None

    def capital(self, state: None) -> Fraction:
        return Fraction(1)

    def ones_profile(self, state: None, k: int) -> list[Fraction]:
        return [Fraction(1)] * (k + 1)

    def to_bytes(self) -> bytes:
        return bytes([UNIFORM_ID])

    def __repr__(self) -> str:
        return "uniform_model()"


class BernoulliModel(MartingaleModel):
    """Bets a fixed fraction ``q`` of its capital on the next bit being 1."""

    exchangeable = True

    def __init__(self, q: Fraction):
        q = Fraction(q)
        if not 0 < q < 1:
            raise ParameterOutOfRange(f"bernoulli bias must lie in (0, 1), got {q}")
        self.q = q
        self._gain = {"1": 2 * q, "0": 2 * (1 - q)}

    def start(self) -> Fraction:
        return Fraction(1)

    def step(self, state: Fraction, bit: str) -> Fraction:
        return state * self._gain[bit]

    def capital(self, state: Fraction) -> Fraction:
        return state

    def ones_profile(self, state: Fraction, k: int) -> list[Fraction]:
        out = [state * self._gain["0"] ** k]
        ratio = self.q / (1 - self.q)
        for _ in range(k):
            out.append(out[-1] * ratio)
        return out

    def to_bytes(self) -> bytes:
        if self.q.denominator >= 1 << 32:
            raise ParameterOutOfRange("bias does not fit the 32-bit header fields")
        return bytes([BERNOULLI_ID]) + _U32.pack(self.q.numerator) + _U32.pack(self.q.denominator)

    def __repr__(self) -> str:
        return f"bernoulli_model({self.q})"


class KTModel(MartingaleModel):
    """Krichevsky-Trofimov (add one half) bettor.

    State is ``(zeros, ones, capital)``; the next bit ``b`` multiplies the
    capital by ``(2 c_b + 1) / (zeros + ones + 1)``.
    """

    exchangeable = True

    def start(self) -> tuple[int, int, Fraction]:
        return (0, 0, Fraction(1))

    def step(self, state: tuple[int, int, Fraction], bit: str) -> tuple[int, int, Fraction]:
        zeros, ones, cap = state
        total = zeros + ones + 1
        if bit == "1":
            return (zeros, ones + 1, cap * Fraction(2 * ones + 1, total))
        return (zeros + 1, ones, cap * Fraction(2 * zeros + 1, total))

    def capital(self, state: tuple[int, int, Fraction]) -> Fraction:
        return state[2]

    def ones_profile(self, state: tuple[int, int, Fraction], k: int) -> list[Fraction]:
        zeros, ones, cap = state
        zero_run = [1]
        one_run = [1]
        for x in range(k):
            zero_run.append(zero_run[-1] * (2 * (zeros + x) + 1))
            one_run.append(one_run[-1] * (2 * (ones + x) + 1))
        den = 1
        for z in range(k):
            den *= zeros + ones + z + 1
        return [cap * Fraction(zero_run[k - j] * one_run[j], den) for j in range(k + 1)]

    def to_bytes(self) -> bytes:
        return bytes([KT_ID])

    def __repr__(self) -> str:
        return "kt_model()"


class MixtureModel(MartingaleModel):
    def __init__(self, models: Sequence[MartingaleModel], weights: Sequence[Fraction]):
        weights = [Fraction(w) for w in weights]
        if len(models) != len(weights):
            raise ParameterOutOfRange("mixture needs one weight per model")
        if any(w <= 0 for w in weights):
            raise ParameterOutOfRange("mixture weights must be positive")
        if sum(weights, Fraction(0)) != 1:
            raise WeightsNotNormalized(f"mixture weights sum to {sum(weights)}, not 1")
        if len(models) > 255:
            raise ParameterOutOfRange("at most 255 mixture components")
        self.models = tuple(models)
        self.weights = tuple(weights)
        self.exchangeable = all(m.exchangeable for m in self.models)

    def start(self) -> tuple:
        return tuple(m.start() for m in self.models)

    def step(self, state: tuple, bit: str) -> tuple:
        return tuple(m.step(s, bit) for m, s in zip(self.models, state))

    def capital(self, state: tuple) -> Fraction:
        return sum((w * m.capital(s) for m, w, s in zip(self.models, self.weights, state)),
                   Fraction(0))

    def ones_profile(self, state: tuple, k: int) -> list[Fraction]:
        total = [Fraction(0)] * (k + 1)
        for m, w, s in zip(self.models, self.weights, state):
            for j, c in enumerate(m.ones_profile(s, k)):
                total[j] += w * c
        return total

    def to_bytes(self) -> bytes:
        out = bytearray([MIXTURE_ID, len(self.models)])
        for m, w in zip(self.models, self.weights):
            if w.denominator >= 1 << 32:
                raise ParameterOutOfRange("weight does not fit the 32-bit header fields")
            out += _U32.pack(w.numerator) + _U32.pack(w.denominator) + m.to_bytes()
        return bytes(out)

    def __repr__(self) -> str:
        parts = ", ".join(f"{w}*{m!r}" for m, w in zip(self.models, self.weights))
        return f"mixture_model({parts})"


class SlowStagedModel(MartingaleModel):
    """Same capital as the wrapped model, enumerated through the stage loop.

    ``staged(w, t) = value(w) * (1 - 2**-(t+1))``; admission then depends on
    the stage at which each extension clears the threshold.
    """

    staged_order = True

    def __init__(self, inner: MartingaleModel):
        if isinstance(inner, SlowStagedModel):
            raise ParameterOutOfRange("model is already slow-staged")
        self.inner = inner
        self.exchangeable = inner.exchangeable

    def start(self) -> Any:
        return self.inner.start()

    def step(self, state: Any, bit: str) -> Any:
        return self.inner.step(state, bit)

    def capital(self, state: Any) -> Fraction:
        return self.inner.capital(state)

    def staged_capital(self, state: Any, t: int) -> Fraction:
        return self.inner.capital(state) * _stage_factor(t)

    def ones_profile(self, state: Any, k: int) -> list[Fraction]:
        return self.inner.ones_profile(state, k)

    def to_bytes(self) -> bytes:
        raw = self.inner.to_bytes()
        return bytes([raw[0] | SLOW_FLAG]) + raw[1:]

    def __repr__(self) -> str:
        return f"slow_staged_wrapper({self.inner!r})"


def uniform_model() -> UniformModel:
    return UniformModel()


def bernoulli_model(q: Fraction) -> BernoulliModel:
    return BernoulliModel(q)


def kt_model() -> KTModel:
    return KTModel()


def mixture_model(models: Sequence[MartingaleModel], weights: Sequence[Fraction]) -> MixtureModel:
    return MixtureModel(models, weights)


def slow_staged_wrapper(model: MartingaleModel) -> SlowStagedModel:
    return SlowStagedModel(model)


def builtin_models() -> list[MartingaleModel]:
    """The four stock models used throughout the test and acceptance suites."""
    return [
        uniform_model(),
        bernoulli_model(Fraction(1, 4)),
        kt_model(),
        mixture_model([kt_model(), bernoulli_model(Fraction(1, 4))],
                      [Fraction(1, 2), Fraction(1, 2)]),
    ]


def model_from_bytes(data: bytes, offset: int = 0) -> tuple[MartingaleModel, int]:
    """Parse a serialized model; returns the model and the bytes consumed."""
    try:
        model, end = _parse_model(data, offset, depth=0)
    except (IndexError, struct.error) as exc:
        raise MalformedCode("truncated model description") from exc
    return model, end - offset


def _parse_model(data: bytes, pos: int, depth: int) -> tuple[MartingaleModel, int]:
    if depth > 8:
        raise MalformedCode("model description nested too deeply")
    tag = data[pos]
    slow = bool(tag & SLOW_FLAG)
    kind = tag & ~SLOW_FLAG
    pos += 1
    model: MartingaleModel
    if kind == UNIFORM_ID:
        model = UniformModel()
    elif kind == KT_ID:
        model = KTModel()
    elif kind == BERNOULLI_ID:
        (num,) = _U32.unpack_from(data, pos)
        (den,) = _U32.unpack_from(data, pos + 4)
        pos += 8
        if den == 0:
            raise MalformedCode("zero denominator in bernoulli bias")
        model = BernoulliModel(Fraction(num, den))
    elif kind == MIXTURE_ID:
        count = data[pos]
        pos += 1
        models, weights = [], []
        for _ in range(count):
            (num,) = _U32.unpack_from(data, pos)
            (den,) = _U32.unpack_from(data, pos + 4)
            pos += 8
            if den == 0:
                raise MalformedCode("zero denominator in mixture weight")
            sub, pos = _parse_model(data, pos, depth + 1)
            models.append(sub)
            weights.append(Fraction(num, den))
        model = MixtureModel(models, weights)
    else:
        raise MalformedCode(f"unknown model id 0x{tag:02x}")
    if slow:
        model = SlowStagedModel(model)
    return model, pos


@dataclass(frozen=True)
class ScaledPow2:
    """The exact real number ``coefficient * 2**exponent``."""

    coefficient: Fraction
    exponent: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.coefficient <= 0:
            raise ParameterOutOfRange("ScaledPow2 coefficient must be positive")

    def times_pow2(self, e: Fraction) -> ScaledPow2:
        return ScaledPow2(self.coefficient, self.exponent + e)

    def __float__(self) -> float:
        return float(self.coefficient) * 2.0 ** float(self.exponent)


def compare_pow2(a: ScaledPow2, b: ScaledPow2) -> int:
    """Exact sign of ``a - b`` (-1, 0 or 1).

    With ``a.exp - b.exp = p/q`` this compares ``(a.coeff/b.coeff)**q`` with
    ``2**-p`` in exact rationals.
    """
    delta = a.exponent - b.exponent
    p, q = delta.numerator, delta.denominator
    lhs = (a.coefficient / b.coefficient) ** q
    rhs = Fraction(1, 1 << p) if p >= 0 else Fraction(1 << -p)
    return (lhs > rhs) - (lhs < rhs)


def induced_sgale(m: MartingaleModel, s: Fraction, w: BitString) -> ScaledPow2:
    """``2**((s-1)|w|) * value(w)`` as a symbolic power of two."""
    return ScaledPow2(m.value(w), (Fraction(s) - 1) * len(w))


def all_strings(k: int) -> Iterator[BitString]:
    """Every string of length ``k`` in lexicographic order."""
    for t in itertools.product("01", repeat=k):
        yield "".join(t)


def extension_values(m: MartingaleModel, w: BitString, k: int) -> Iterator[tuple[BitString, Fraction]]:
    """``(u, value(w u))`` for every ``u`` of length ``k``, by depth-first walk."""
    def walk(state: Any, u: str) -> Iterator[tuple[BitString, Fraction]]:
        if len(u) == k:
            yield u, m.capital(state)
            return
        for b in "01":
            yield from walk(m.step(state, b), u + b)

    yield from walk(m.state_of(w), "")


def _check_bound(k: int, bound: int) -> None:
    if k > bound:
        raise ExhaustiveBoundExceeded(f"k={k} exceeds the exhaustive bound {bound}")


def count_exceeding(m: MartingaleModel, w: BitString, k: int, alpha: Fraction, l: Fraction,
                    bound: int = EXHAUSTIVE_BOUND) -> int:
    """Number of ``u`` in ``{0,1}^k`` with ``value(w u) >= alpha 2^(k-l) value(w)``."""
    _check_bound(k, bound)
    threshold = ScaledPow2(Fraction(alpha) * m.value(w), k - Fraction(l))
    return sum(1 for _, v in extension_values(m, w, k)
               if compare_pow2(ScaledPow2(v, 0), threshold) >= 0)


def count_exceeding_prefix_max(m: MartingaleModel, w: BitString, k: int, s: Fraction,
                               alpha: Fraction, bound: int = EXHAUSTIVE_BOUND) -> int:
    """Count ``u`` whose best prefix ``v`` has ``2^((1-s)|v|) d_s(w v) >= alpha d_s(w)``.

    ``d_s`` is the s-gale induced by ``m``.
    """
    _check_bound(k, bound)
    s = Fraction(s)
    target = induced_sgale(m, s, w)
    target = ScaledPow2(Fraction(alpha) * target.coefficient, target.exponent)
    base = (s - 1) * len(w)

    def meets(state: Any, depth: int) -> bool:
        scaled = ScaledPow2(m.capital(state), base + (s - 1) * depth + (1 - s) * depth)
        return compare_pow2(scaled, target) >= 0

    def walk(state: Any, depth: int, hit: bool) -> int:
        hit = hit or meets(state, depth)
        if depth == k:
            return int(hit)
        if hit:
            return 1 << (k - depth)
        return walk(m.step(state, "0"), depth + 1, hit) + walk(m.step(state, "1"), depth + 1, hit)

    return walk(m.state_of(w), 0, False)


def capital_sum(m: MartingaleModel, k: int, w: BitString = "") -> Fraction:
    return sum((v for _, v in extension_values(m, w, k)), Fraction(0))


def is_fair_at(m: MartingaleModel, w: BitString) -> bool:
    state = m.state_of(w)
    return m.capital(state) * 2 == m.capital(m.step(state, "0")) + m.capital(m.step(state, "1"))

