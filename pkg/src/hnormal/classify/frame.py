"""Working copy of a pair in neutral-frame coordinates.

The frame splits ``C^n`` into ``S0 (s) + S (m) + S1 (s)`` with
``H = [[0,0,I],[0,H1,0],[I,0,0]]``; ``N - lambda`` is block upper triangular
with blocks ``U = N[S0,S]``, ``K = N[S,S]``, ``V = N[S,S1]``, ``W = N[S0,S1]``.
Moves that preserve this shape are outer scalings ``diag(A, G, A^{-*})`` and
unipotent shears; both are applied to ``M`` and ``Hf`` alike.
"""

from __future__ import annotations

import numpy as np

from ..matcore import hermitian_part


class Frame:
    def __init__(self, M, Hf, s: int, lam: complex):
        self.M = np.array(M, dtype=complex)
        self.Hf = np.array(Hf, dtype=complex)
        self.s = s
        self.lam = complex(lam)

    @property
    def n(self) -> int:
        return self.M.shape[0]

    @property
    def m(self) -> int:
        return self.n - 2 * self.s

    def _nil(self):
        return self.M - self.lam * np.eye(self.n)

    @property
    def U(self):
        s, m = self.s, self.m
        return self._nil()[:s, s:s + m]

    @property
    def K(self):
        s, m = self.s, self.m
        return self._nil()[s:s + m, s:s + m]

    @property
    def V(self):
        s, m = self.s, self.m
        return self._nil()[s:s + m, s + m:]

    @property
    def W(self):
        s, m = self.s, self.m
        return self._nil()[:s, s + m:]

    @property
    def H1(self):
        s, m = self.s, self.m
        return self.Hf[s:s + m, s:s + m]

    def apply(self, S) -> None:
        S = np.asarray(S, dtype=complex)
        self.M = np.linalg.solve(S, self.M @ S)
        self.Hf = hermitian_part(S.conj().T @ self.Hf @ S)

    def scale(self, A=None, G=None) -> None:
        """``diag(A, G, A^{-*})``; ``G`` may change ``H1`` (used for internal re-basing)."""
        s, m = self.s, self.m
        A = np.eye(s) if A is None else np.atleast_2d(np.asarray(A, dtype=complex))
        G = np.eye(m) if G is None else np.atleast_2d(np.asarray(G, dtype=complex))
        S = np.zeros((self.n, self.n), dtype=complex)
        S[:s, :s] = A
        S[s:s + m, s:s + m] = G
        S[s + m:, s + m:] = np.linalg.inv(A).conj().T
        self.apply(S)

    def shear(self, P) -> None:
        """Unipotent move ``[[I,P,Q],[0,I,R],[0,0,I]]`` with ``R = -H1^{-1} P*``."""
        s, m = self.s, self.m
        P = np.asarray(P, dtype=complex).reshape(s, m)
        R = -np.linalg.solve(self.H1, P.conj().T)
        Q = -0.5 * R.conj().T @ self.H1 @ R
        S = np.eye(self.n, dtype=complex)
        S[:s, s:s + m] = P
        S[:s, s + m:] = Q
        S[s:s + m, s + m:] = R
        self.apply(S)
