"""Model bundle persistence as a single JSON checkpoint file.

The file pins the format version, the wide-feature layout version, and the
encoder identity; loading refuses anything it cannot faithfully restore
instead of guessing.
"""

from __future__ import annotations

import json

import numpy as np

from .encoder import BaselineEncoder, Encoder
from .errors import CompatibilityError, DataError, UsageError
from .features import FEATURE_VERSION
from .tracker import ModelBundle

FORMAT_NAME = "sgdst-checkpoint"
FORMAT_VERSION = 1


def _params_to_raw(params: dict[str, np.ndarray]) -> dict:
    return {k: v.tolist() for k, v in params.items()}


def _params_from_raw(raw: dict) -> dict[str, np.ndarray]:
    return {k: np.asarray(v, dtype=np.float64) for k, v in raw.items()}


def save_checkpoint(path: str, bundle: ModelBundle) -> None:
    if isinstance(bundle.encoder, BaselineEncoder):
        encoder_info = {
            "kind": "baseline",
            "dim": bundle.encoder.dim,
            "seed": bundle.encoder.seed,
        }
    else:
        encoder_info = {
            "kind": "sidecar",
            "dim": bundle.encoder.dim,
            "name": bundle.encoder.name,
        }
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "feature_version": FEATURE_VERSION,
        "encoder": encoder_info,
        "thresholds": {
            "answer": bundle.answer_threshold,
            "requested": bundle.requested_threshold,
            "max_span_tokens": bundle.max_span_tokens,
        },
        "params": {
            "mrc": _params_to_raw(bundle.mrc_params),
            "intent": _params_to_raw(bundle.intent_params),
            "requested": _params_to_raw(bundle.requested_params),
            "categorical": _params_to_raw(bundle.categorical_params),
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_checkpoint(path: str, encoder: Encoder | None = None) -> ModelBundle:
    """Restore a bundle; pass an encoder to override or satisfy "sidecar".

    The lexicon is data, not parameters, and is attached by the caller.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise DataError(f"{path} is not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise CompatibilityError(
            f"checkpoint version {doc.get('version')} unsupported (want {FORMAT_VERSION})"
        )
    if doc.get("feature_version") != FEATURE_VERSION:
        raise CompatibilityError(
            f"checkpoint wide-feature layout v{doc.get('feature_version')} does not "
            f"match this build (v{FEATURE_VERSION})"
        )
    info = doc.get("encoder", {})
    dim = int(info.get("dim", 0))
    if encoder is None:
        if info.get("kind") == "baseline":
            encoder = BaselineEncoder(dim=dim, seed=int(info.get("seed", 0)))
        else:
            raise UsageError(
                "checkpoint was trained with an external encoder "
                f"({info.get('name')!r}); pass a connected encoder to load it"
            )
    if encoder.dim != dim:
        raise CompatibilityError(
            f"encoder dimension {encoder.dim} does not match checkpoint ({dim})"
        )
    thresholds = doc.get("thresholds", {})
    params = doc.get("params", {})
    missing = {"mrc", "intent", "requested", "categorical"} - set(params)
    if missing:
        raise DataError(f"checkpoint missing parameter sections: {sorted(missing)}")
    return ModelBundle(
        encoder=encoder,
        mrc_params=_params_from_raw(params["mrc"]),
        intent_params=_params_from_raw(params["intent"]),
        requested_params=_params_from_raw(params["requested"]),
        categorical_params=_params_from_raw(params["categorical"]),
        max_span_tokens=int(thresholds.get("max_span_tokens", 12)),
        answer_threshold=float(thresholds.get("answer", 0.5)),
        requested_threshold=float(thresholds.get("requested", 0.5)),
    )
