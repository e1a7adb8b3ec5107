"""Word-form changes: bundled inflection table plus regular suffix rules."""

from __future__ import annotations

import logging
from importlib import resources
from pathlib import Path

from .errors import InputError

log = logging.getLogger(__name__)

#: explicit inflection keys accepted besides Penn tags
CASE_FORMS = ("lc", "cap")


def _regular_inflect(lemma: str, tag: str) -> str | None:
    if tag in ("VB", "VBP", "NN"):
        return lemma
    if tag in ("VBZ", "NNS"):
        if lemma.endswith(("s", "x", "z", "ch", "sh")):
            return lemma + "es"
        if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in "aeiou":
            return lemma[:-1] + "ies"
        return lemma + "s"
    if tag in ("VBD", "VBN"):
        if lemma.endswith("e"):
            return lemma + "d"
        if lemma.endswith("y") and len(lemma) > 1 and lemma[-2] not in "aeiou":
            return lemma[:-1] + "ied"
        return lemma + "ed"
    if tag == "VBG":
        if lemma.endswith("e") and not lemma.endswith(("ee", "oe", "ye")):
            return lemma[:-1] + "ing"
        return lemma + "ing"
    return None


class Morphology:
    """Inflection table (LEMMA TAG SURFACE rows) with regular-rule fallback."""

    def __init__(self, table: dict[tuple[str, str], str]):
        self.table = table
        self._warned: set[tuple[str, str]] = set()

    @classmethod
    def from_file(cls, path: str | Path) -> "Morphology":
        table = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line or line.startswith("#"):
                    continue
                cols = line.split("\t")
                if len(cols) != 3:
                    raise InputError(f"{path}:{lineno}: morphology rows need LEMMA TAG SURFACE")
                lemma, tag, surface = cols
                table[(lemma.lower(), tag)] = surface
        return cls(table)

    def change_form(self, surface: str, lemma: str, target_form_tag: str) -> str:
        """Inflect `surface` (with lemma `lemma`) into the requested form.

        Falls back to the unchanged surface with a warning when neither the
        table nor the regular rules cover the request.
        """
        if target_form_tag == "lc":
            return surface.lower()
        if target_form_tag == "cap":
            return surface[:1].upper() + surface[1:]
        result = self.table.get((lemma.lower(), target_form_tag))
        if result is None:
            result = _regular_inflect(lemma, target_form_tag)
        if result is None:
            key = (lemma, target_form_tag)
            if key not in self._warned:
                self._warned.add(key)
                log.warning("no %s form for %r; keeping surface %r", target_form_tag, lemma, surface)
            return surface
        if surface[:1].isupper() and result[:1].islower() and target_form_tag.startswith("NN"):
            return result[:1].upper() + result[1:]
        return result


_default_morphology: Morphology | None = None


def default_morphology() -> Morphology:
    global _default_morphology
    if _default_morphology is None:
        path = Path(str(resources.files("questgen") / "data" / "morphology.tsv"))
        _default_morphology = Morphology.from_file(path)
    return _default_morphology


def change_form(surface: str, lemma: str, target_form_tag: str) -> str:
    """Inflect against the bundled table (module-level convenience)."""
    return default_morphology().change_form(surface, lemma, target_form_tag)
