"""JSON document formats for posets and monotone maps.

Poset document::

    {"elements": ["a", "b"], "leq": [["a", "b"]]}

Function document (``poset`` is optional, an inline poset document, or a
path relative to the file holding the function)::

    {"poset": "chain2.json", "values": {"a": "0", "b": "1/2"}}

A generator/target file holds one function document, a list of them, or
an object with one list of them, such as ``{"generators": [...]}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional

from .posets import FinPreorder, MonotoneMap, PosetError, load_poset, load_preorder


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text())


def poset_from_ref(ref: Any, base: Path, allow_preorder: bool = False) -> FinPreorder:
    if isinstance(ref, dict):
        doc = ref
    elif isinstance(ref, str):
        doc = read_json(base / ref)
    else:
        raise PosetError("'poset' must be an inline document or a file name")
    return load_preorder(doc) if allow_preorder else load_poset(doc)


def load_function(doc: Any, X: Optional[FinPreorder], base: Path = Path(".")) -> MonotoneMap:
    """Validate a function document against X (or its own ``poset`` entry)."""
    if not isinstance(doc, dict) or "values" not in doc:
        raise PosetError("function document needs a 'values' object")
    if "poset" in doc:
        own = poset_from_ref(doc["poset"], base, allow_preorder=X is not None and not X.is_antisymmetric())
        if X is not None and own != X:
            raise PosetError("function is defined on a different poset")
        X = own
    if X is None:
        raise PosetError("no poset given for function document")
    return MonotoneMap.from_dict(X, doc["values"])


def load_functions(path: str | Path, X: Optional[FinPreorder], key: str) -> list[MonotoneMap]:
    path = Path(path)
    doc = read_json(path)
    if isinstance(doc, dict) and "values" not in doc:
        lists = [v for v in doc.values() if isinstance(v, list)]
        if key in doc:
            doc = doc[key]
        elif len(lists) == 1:
            doc = lists[0]
    items = doc if isinstance(doc, list) else [doc]
    return [load_function(d, X, path.parent) for d in items]


def function_doc(f: MonotoneMap) -> dict:
    return {"poset": f.domain.to_doc(), **f.to_doc()}
