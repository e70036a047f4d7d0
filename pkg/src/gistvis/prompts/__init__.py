"""Versioned prompt templates, shipped as data files.

Each ``.txt`` file holds an optional system block and a user block separated
by a line containing only ``---``. Placeholders use ``str.format`` names.
A directory passed at call time overrides the packaged defaults per file.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class Template:
    name: str
    system: str
    user: str

    @property
    def digest(self) -> str:
        content = self.system + "\n---\n" + self.user
        return hashlib.sha256(content.encode("utf-8")).hexdigest()


def _parse(name: str, raw: str) -> Template:
    if "\n---\n" in raw:
        system, user = raw.split("\n---\n", 1)
    else:
        system, user = "", raw
    return Template(name=name, system=system.strip(), user=user.strip())


def load_template(name: str, prompts_dir: Optional[str | Path] = None) -> Template:
    filename = f"{name}.txt"
    if prompts_dir is not None:
        override = Path(prompts_dir) / filename
        if override.exists():
            return _parse(name, override.read_text(encoding="utf-8"))
    raw = resources.files(__package__).joinpath(filename).read_text(encoding="utf-8")
    return _parse(name, raw)
