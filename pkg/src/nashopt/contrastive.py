"""Desk-scale two-encoder contrastive game on synthetic Gaussian features.

Player x holds the flattened weights of a p x d_img linear image encoder,
player y the flattened weights of a p x d_txt linear text encoder.  Each
encoder maps its fixed feature batch to p-dimensional embeddings, which
are Euclidean-normalized; the similarity matrix

    logits[i, j] = <I_i, T_j> / temperature

feeds a row-wise softmax cross-entropy against the diagonal for the image
loss and the same on the transposed logits for the text loss.  The two
losses are coupled through the shared similarity matrix but are not
negatives of each other, so the game is genuinely non-zero-sum.

Gradients are analytic (softmax cross-entropy backward through the
normalization); second derivatives are deliberately not provided, so
methods that need mixed Hessian blocks pay the finite-difference price
per iteration while secant-based methods do not.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError
from .games import SmoothGame

__all__ = ["ContrastiveGameSpec", "ContrastiveGame",
           "image_loss_from_logits", "text_loss_from_logits"]

# Embedding norms below this mean the encoder annihilated a feature;
# normalization would divide by ~0, so evaluation fails instead.
NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class ContrastiveGameSpec:
    """Size and data parameters of the contrastive game."""

    batch_size: int = 8
    d_img: int = 6
    d_txt: int = 6
    embed_dim: int = 4
    temperature: float = 0.09
    data_seed: int = 0

    def __post_init__(self):
        for name in ("batch_size", "d_img", "d_txt", "embed_dim"):
            val = int(getattr(self, name))
            object.__setattr__(self, name, val)
            if val < 1:
                raise ValueError(f"{name} must be at least 1, got {val}")
        object.__setattr__(self, "temperature", float(self.temperature))
        object.__setattr__(self, "data_seed", int(self.data_seed))
        if not self.temperature > 0:
            raise ValueError(f"temperature must be positive, got {self.temperature}")


def _logsumexp_rows(L: np.ndarray) -> np.ndarray:
    peak = L.max(axis=1, keepdims=True)
    return (peak + np.log(np.exp(L - peak).sum(axis=1, keepdims=True))).ravel()


def image_loss_from_logits(L: np.ndarray) -> float:
    """Mean row-wise cross-entropy of logits against the diagonal targets."""
    L = np.asarray(L, dtype=np.float64)
    return float(np.mean(_logsumexp_rows(L) - np.diag(L)))


def text_loss_from_logits(L: np.ndarray) -> float:
    """Mean column-wise cross-entropy: the image loss of the transposed logits."""
    return image_loss_from_logits(np.asarray(L).T)


def _row_softmax(L: np.ndarray) -> np.ndarray:
    E = np.exp(L - L.max(axis=1, keepdims=True))
    return E / E.sum(axis=1, keepdims=True)


class ContrastiveGame(SmoothGame):
    """Two-encoder contrastive game; see the module docstring."""

    def __init__(self, spec: ContrastiveGameSpec, img_features=None, txt_features=None):
        self.spec = spec
        N = spec.batch_size
        p = spec.embed_dim
        rng = np.random.Generator(np.random.Philox(spec.data_seed))
        if img_features is None:
            img_features = rng.standard_normal((spec.d_img, N))
        if txt_features is None:
            txt_features = rng.standard_normal((spec.d_txt, N))
        img_features = np.array(img_features, dtype=np.float64, copy=True)
        txt_features = np.array(txt_features, dtype=np.float64, copy=True)
        if img_features.shape != (spec.d_img, N) or txt_features.shape != (spec.d_txt, N):
            raise ValueError("feature matrices must be d_img x N and d_txt x N")
        img_features.setflags(write=False)
        txt_features.setflags(write=False)
        self.img_features = img_features
        self.txt_features = txt_features

        m = p * spec.d_img
        n = p * spec.d_txt
        super().__init__(m, n, self._loss_f, self._loss_g,
                         grad_x_f=self._grad_x_f, grad_y_g=self._grad_y_g,
                         name=f"toy-contrastive[N={N},p={p},seed={spec.data_seed}]")

    def default_start(self, rng: np.random.Generator) -> np.ndarray:
        sp = self.spec
        x = rng.standard_normal(self.m) / np.sqrt(sp.d_img)
        y = rng.standard_normal(self.n) / np.sqrt(sp.d_txt)
        return np.concatenate([x, y])

    def _normalized_embeddings(self, v: np.ndarray):
        sp = self.spec
        X = v[:self.m].reshape(sp.embed_dim, sp.d_img)
        Y = v[self.m:].reshape(sp.embed_dim, sp.d_txt)
        U = X @ self.img_features
        Z = Y @ self.txt_features
        unorm = np.linalg.norm(U, axis=0)
        znorm = np.linalg.norm(Z, axis=0)
        for label, norms in (("image", unorm), ("text", znorm)):
            small = np.flatnonzero(norms < NORM_FLOOR)
            if small.size:
                idx = int(small[0])
                raise EvaluationError(
                    f"{label} embedding for sample {idx} has near-zero norm "
                    f"({norms[idx]:.3e}); the encoder annihilated the feature",
                    coordinate=idx)
        return U / unorm, Z / znorm, U, Z, unorm, znorm

    def _logits(self, v: np.ndarray) -> np.ndarray:
        I_emb, T_emb, *_ = self._normalized_embeddings(v)
        return (I_emb.T @ T_emb) / self.spec.temperature

    def _loss_f(self, v: np.ndarray) -> float:
        return image_loss_from_logits(self._logits(v))

    def _loss_g(self, v: np.ndarray) -> float:
        return text_loss_from_logits(self._logits(v))

    @staticmethod
    def _backprop_normalization(G_emb, emb_normed, raw_norms):
        # d/dU of h(U/|U|) column-wise: (g - e <e, g>) / |U|
        inner = np.sum(emb_normed * G_emb, axis=0, keepdims=True)
        return (G_emb - emb_normed * inner) / raw_norms

    def _grad_x_f(self, v: np.ndarray) -> np.ndarray:
        sp = self.spec
        I_emb, T_emb, U, Z, unorm, znorm = self._normalized_embeddings(v)
        L = (I_emb.T @ T_emb) / sp.temperature
        G = (_row_softmax(L) - np.eye(sp.batch_size)) / sp.batch_size
        dI = (T_emb @ G.T) / sp.temperature
        dU = self._backprop_normalization(dI, I_emb, unorm)
        return (dU @ self.img_features.T).ravel()

    def _grad_y_g(self, v: np.ndarray) -> np.ndarray:
        sp = self.spec
        I_emb, T_emb, U, Z, unorm, znorm = self._normalized_embeddings(v)
        L = (I_emb.T @ T_emb) / sp.temperature
        # text loss softmaxes the columns of L (rows of L^T)
        Gt = (_row_softmax(L.T).T - np.eye(sp.batch_size)) / sp.batch_size
        dT = (I_emb @ Gt) / sp.temperature
        dZ = self._backprop_normalization(dT, T_emb, znorm)
        return (dZ @ self.txt_features.T).ravel()
