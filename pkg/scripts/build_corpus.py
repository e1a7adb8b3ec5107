#!/usr/bin/env python3
"""Regenerate the bundled data files: lexicon, gazetteer, morphology table and
the synthetic training corpus of sentence-question pairs.

Run from the repository root:

    python scripts/build_corpus.py [--pairs 1200] [--check]

The corpus is template-generated from the entity tables below, so the bundled
lexicon and gazetteer cover its vocabulary by construction.  --check trains a
store on the freshly written corpus and reports extraction failures.
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "questgen" / "data"

# --- entity tables ------------------------------------------------------------

COUNTRIES = [
    # (country, capital, currency)
    ("Slovakia", "Bratislava", "euro"),
    ("Czechia", "Prague", "koruna"),
    ("France", "Paris", "euro"),
    ("Germany", "Berlin", "euro"),
    ("Spain", "Madrid", "euro"),
    ("Italy", "Rome", "euro"),
    ("Portugal", "Lisbon", "euro"),
    ("Austria", "Vienna", "euro"),
    ("Poland", "Warsaw", "zloty"),
    ("Hungary", "Budapest", "forint"),
    ("Norway", "Oslo", "krone"),
    ("Sweden", "Stockholm", "krona"),
    ("Finland", "Helsinki", "euro"),
    ("Denmark", "Copenhagen", "krone"),
    ("Greece", "Athens", "euro"),
    ("Egypt", "Cairo", "pound"),
    ("Japan", "Tokyo", "yen"),
    ("China", "Beijing", "yuan"),
    ("India", "Delhi", "rupee"),
    ("Brazil", "Brasilia", "real"),
    ("Canada", "Ottawa", "dollar"),
    ("Australia", "Canberra", "dollar"),
    ("Kenya", "Nairobi", "shilling"),
    ("Nigeria", "Abuja", "naira"),
    ("Thailand", "Bangkok", "baht"),
    ("Vietnam", "Hanoi", "dong"),
    ("Peru", "Lima", "sol"),
    ("Chile", "Santiago", "peso"),
    ("Argentina", "Buenos Aires", "peso"),
    ("Mexico", "Mexico City", "peso"),
    ("Turkey", "Ankara", "lira"),
    ("Iceland", "Reykjavik", "krona"),
    ("Ireland", "Dublin", "euro"),
    ("England", "London", "pound"),
    ("Scotland", "Edinburgh", "pound"),
    ("Netherlands", "Amsterdam", "euro"),
    ("Belgium", "Brussels", "euro"),
    ("Switzerland", "Bern", "franc"),
    ("Croatia", "Zagreb", "euro"),
    ("Serbia", "Belgrade", "dinar"),
    ("Romania", "Bucharest", "leu"),
    ("Bulgaria", "Sofia", "lev"),
    ("Ukraine", "Kyiv", "hryvnia"),
    ("Slovenia", "Ljubljana", "euro"),
    ("Morocco", "Rabat", "dirham"),
]

FIRST_NAMES = [
    "Peter", "Andrej", "Marie", "Albert", "Isaac", "Ada", "Alan", "Grace",
    "Nikola", "Charles", "Anna", "Jan", "Maria", "Milan", "Eva", "Pavol",
    "Lucia", "Tomas", "Jana", "Martin", "Elena", "Viktor", "Sofia", "Ivan",
    "Nina", "Oskar", "Clara", "Hugo", "Alma", "Felix",
]

LAST_NAMES = [
    "Sagan", "Kiska", "Curie", "Einstein", "Newton", "Lovelace", "Turing",
    "Hopper", "Tesla", "Darwin", "Novak", "Kowalski", "Silva", "Horvat",
    "Moreau", "Weber", "Rossi", "Nielsen", "Kovacs", "Petrov", "Janssen",
    "Svoboda", "Dvorak", "Fischer", "Lindgren", "Costa", "Haas", "Bernard",
    "Keller", "Marek",
]

THREE_TOKEN_PEOPLE = [
    "Charles de Gaulle", "Vincent van Gogh", "Ludwig van Beethoven",
    "Leonardo da Vinci", "Johann von Goethe", "Erik van Dijk",
    "Bhumibol Adulyadej",  # two tokens; listed here to always include it
]

MONONYMS = ["Plato", "Aristotle", "Homer", "Pele", "Madonna", "Voltaire"]

ROLES = [
    "president", "king", "queen", "mayor", "minister", "chancellor",
    "director", "captain", "coach", "professor",
]

SPORTS = ["football", "tennis", "hockey", "chess", "golf", "cricket", "rugby"]

LANDMARKS = ["cathedral", "castle", "bridge", "museum", "tower", "statue"]

CONTINENTS = ["Europe", "Asia", "Africa"]

ADJECTIVES = ["current", "first", "new", "old", "famous", "main"]

# --- lexicon -------------------------------------------------------------------

LEXICON = {
    # closed classes
    "the": ("the", "DT"), "a": ("a", "DT"), "an": ("an", "DT"),
    "of": ("of", "IN"), "in": ("in", "IN"), "from": ("from", "IN"),
    "for": ("for", "IN"), "as": ("as", "IN"), "at": ("at", "IN"),
    "on": ("on", "IN"), "with": ("with", "IN"), "by": ("by", "IN"),
    "and": ("and", "CC"), "but": ("but", "CC"), "or": ("or", "CC"),
    "to": ("to", "TO"), "not": ("not", "RB"),
    "he": ("he", "PRP"), "she": ("she", "PRP"), "it": ("it", "PRP"),
    "they": ("they", "PRP"), "his": ("his", "PRP$"), "her": ("her", "PRP$"),
    "its": ("its", "PRP$"), "their": ("their", "PRP$"),
    "who": ("who", "WP"), "what": ("what", "WP"), "whose": ("whose", "WP$"),
    "which": ("which", "WDT"), "that": ("that", "WDT"),
    "where": ("where", "WRB"), "when": ("when", "WRB"),
    "how": ("how", "WRB"), "why": ("why", "WRB"),
    # auxiliaries and frequent verbs
    "is": ("be", "VBZ"), "was": ("be", "VBD"), "are": ("be", "VBP"),
    "were": ("be", "VBD"), "be": ("be", "VB"), "been": ("be", "VBN"),
    "being": ("be", "VBG"),
    "does": ("do", "VBZ"), "did": ("do", "VBD"), "do": ("do", "VB"),
    "done": ("do", "VBN"),
    "has": ("have", "VBZ"), "have": ("have", "VB"), "had": ("have", "VBD"),
    "comes": ("come", "VBZ"), "come": ("come", "VB"), "came": ("come", "VBD"),
    "lives": ("live", "VBZ"), "live": ("live", "VB"), "lived": ("live", "VBD"),
    "works": ("work", "VBZ"), "work": ("work", "VB"), "worked": ("work", "VBD"),
    "plays": ("play", "VBZ"), "play": ("play", "VB"), "played": ("play", "VBD"),
    "visited": ("visit", "VBD"), "visit": ("visit", "VB"), "visits": ("visit", "VBZ"),
    "died": ("die", "VBD"), "die": ("die", "VB"), "dies": ("die", "VBZ"),
    "born": ("bear", "VBN"),
    "located": ("locate", "VBN"), "situated": ("situate", "VBN"),
    "borders": ("border", "VBZ"), "border": ("border", "VB"),
    "stands": ("stand", "VBZ"), "stand": ("stand", "VB"), "stood": ("stand", "VBD"),
    "rides": ("ride", "VBZ"), "ride": ("ride", "VB"), "rode": ("ride", "VBD"),
    "wrote": ("write", "VBD"), "write": ("write", "VB"), "writes": ("write", "VBZ"),
    "founded": ("found", "VBD"), "found": ("found", "VB"),
    "goes": ("go", "VBZ"), "go": ("go", "VB"), "went": ("go", "VBD"),
    # common nouns used by the templates
    "capital": ("capital", "NN"), "city": ("city", "NN"), "country": ("country", "NN"),
    "currency": ("currency", "NN"), "north": ("north", "NN"), "south": ("south", "NN"),
    "book": ("book", "NN"), "copper": ("copper", "NN"), "team": ("team", "NN"),
    # adjectives
    "largest": ("large", "JJS"), "famous": ("famous", "JJ"), "main": ("main", "JJ"),
    "current": ("current", "JJ"), "first": ("first", "JJ"), "new": ("new", "JJ"),
    "old": ("old", "JJ"), "tall": ("tall", "JJ"),
}

for word in ROLES + SPORTS + LANDMARKS:
    LEXICON[word] = (word, "NN")

# --- morphology -----------------------------------------------------------------

# lemma -> (VBD, VBN); VBZ/VBG come from the regular rules unless special-cased
IRREGULAR_VERBS = {
    "arise": ("arose", "arisen"), "awake": ("awoke", "awoken"),
    "bear": ("bore", "born"), "beat": ("beat", "beaten"),
    "become": ("became", "become"), "begin": ("began", "begun"),
    "bend": ("bent", "bent"), "bet": ("bet", "bet"), "bind": ("bound", "bound"),
    "bite": ("bit", "bitten"), "bleed": ("bled", "bled"), "blow": ("blew", "blown"),
    "break": ("broke", "broken"), "bring": ("brought", "brought"),
    "build": ("built", "built"), "burn": ("burnt", "burnt"),
    "burst": ("burst", "burst"), "buy": ("bought", "bought"),
    "catch": ("caught", "caught"), "choose": ("chose", "chosen"),
    "cling": ("clung", "clung"), "come": ("came", "come"), "cost": ("cost", "cost"),
    "creep": ("crept", "crept"), "cut": ("cut", "cut"), "deal": ("dealt", "dealt"),
    "dig": ("dug", "dug"), "draw": ("drew", "drawn"), "dream": ("dreamt", "dreamt"),
    "drink": ("drank", "drunk"), "drive": ("drove", "driven"), "eat": ("ate", "eaten"),
    "fall": ("fell", "fallen"), "feed": ("fed", "fed"), "feel": ("felt", "felt"),
    "fight": ("fought", "fought"), "find": ("found", "found"),
    "flee": ("fled", "fled"), "fling": ("flung", "flung"), "fly": ("flew", "flown"),
    "forbid": ("forbade", "forbidden"), "forget": ("forgot", "forgotten"),
    "forgive": ("forgave", "forgiven"), "freeze": ("froze", "frozen"),
    "get": ("got", "got"), "give": ("gave", "given"), "grind": ("ground", "ground"),
    "grow": ("grew", "grown"), "hang": ("hung", "hung"), "hear": ("heard", "heard"),
    "hide": ("hid", "hidden"), "hit": ("hit", "hit"), "hold": ("held", "held"),
    "hurt": ("hurt", "hurt"), "keep": ("kept", "kept"), "kneel": ("knelt", "knelt"),
    "know": ("knew", "known"), "lay": ("laid", "laid"), "lead": ("led", "led"),
    "leave": ("left", "left"), "lend": ("lent", "lent"), "let": ("let", "let"),
    "lie": ("lay", "lain"), "light": ("lit", "lit"), "lose": ("lost", "lost"),
    "make": ("made", "made"), "mean": ("meant", "meant"), "meet": ("met", "met"),
    "pay": ("paid", "paid"), "put": ("put", "put"), "quit": ("quit", "quit"),
    "read": ("read", "read"), "ride": ("rode", "ridden"), "ring": ("rang", "rung"),
    "rise": ("rose", "risen"), "run": ("ran", "run"), "seek": ("sought", "sought"),
    "sell": ("sold", "sold"), "send": ("sent", "sent"), "set": ("set", "set"),
    "shake": ("shook", "shaken"), "shine": ("shone", "shone"),
    "shoot": ("shot", "shot"), "show": ("showed", "shown"),
    "shrink": ("shrank", "shrunk"), "shut": ("shut", "shut"),
    "sing": ("sang", "sung"), "sink": ("sank", "sunk"), "sit": ("sat", "sat"),
    "sleep": ("slept", "slept"), "slide": ("slid", "slid"),
    "speak": ("spoke", "spoken"), "spend": ("spent", "spent"),
    "spin": ("spun", "spun"), "spread": ("spread", "spread"),
    "spring": ("sprang", "sprung"), "stand": ("stood", "stood"),
    "steal": ("stole", "stolen"), "stick": ("stuck", "stuck"),
    "sting": ("stung", "stung"), "strike": ("struck", "struck"),
    "swear": ("swore", "sworn"), "sweep": ("swept", "swept"),
    "swim": ("swam", "swum"), "swing": ("swung", "swung"),
    "take": ("took", "taken"), "teach": ("taught", "taught"),
    "tear": ("tore", "torn"), "tell": ("told", "told"),
    "think": ("thought", "thought"), "throw": ("threw", "thrown"),
    "understand": ("understood", "understood"), "wake": ("woke", "woken"),
    "wear": ("wore", "worn"), "weave": ("wove", "woven"), "weep": ("wept", "wept"),
    "win": ("won", "won"), "wind": ("wound", "wound"), "write": ("wrote", "written"),
    "say": ("said", "said"), "see": ("saw", "seen"),
}

# fully irregular paradigms written out explicitly
SPECIAL_VERBS = {
    "be": {"VB": "be", "VBP": "are", "VBZ": "is", "VBD": "was", "VBN": "been", "VBG": "being"},
    "have": {"VB": "have", "VBP": "have", "VBZ": "has", "VBD": "had", "VBN": "had", "VBG": "having"},
    "do": {"VB": "do", "VBP": "do", "VBZ": "does", "VBD": "did", "VBN": "done", "VBG": "doing"},
    "go": {"VB": "go", "VBP": "go", "VBZ": "goes", "VBD": "went", "VBN": "gone", "VBG": "going"},
}

REGULAR_VERBS = [
    "work", "play", "live", "visit", "move", "call", "name", "create", "open",
    "close", "start", "finish", "help", "want", "need", "use", "like", "love",
    "walk", "talk", "look", "watch", "follow", "carry", "study", "marry", "try",
    "cry", "stay", "plan", "stop", "travel", "cover", "discover", "design",
    "launch", "publish", "record", "produce", "direct", "manage", "govern",
    "rule", "serve", "border", "locate", "situate", "establish", "develop",
    "invent", "paint", "compose", "perform", "score", "train", "coach", "join",
    "form", "represent", "host", "organize", "celebrate", "contain", "include",
    "measure", "span", "stretch", "flow", "die", "found", "happen", "remain",
    "appear", "collect", "connect", "control", "decide", "deliver", "describe",
    "explain", "explore", "express", "gather", "improve", "increase", "mention",
    "offer", "order", "point", "prepare", "present", "protect", "provide",
    "receive", "release", "report", "return", "reveal", "save", "share", "sign",
    "support", "suggest",
]


def _regular(lemma: str, tag: str) -> str:
    if tag in ("VB", "VBP"):
        return lemma
    if tag == "VBZ":
        if lemma.endswith(("s", "x", "z", "ch", "sh")):
            return lemma + "es"
        if lemma.endswith("y") and lemma[-2] not in "aeiou":
            return lemma[:-1] + "ies"
        return lemma + "s"
    if tag in ("VBD", "VBN"):
        if lemma.endswith("e"):
            return lemma + "d"
        if lemma.endswith("y") and lemma[-2] not in "aeiou":
            return lemma[:-1] + "ied"
        return lemma + "ed"
    if tag == "VBG":
        if lemma.endswith("e") and not lemma.endswith(("ee", "oe", "ye")):
            return lemma[:-1] + "ing"
        return lemma + "ing"
    raise ValueError(tag)


def build_morphology() -> list[tuple[str, str, str]]:
    rows = []
    for lemma, forms in SPECIAL_VERBS.items():
        for tag, surface in forms.items():
            rows.append((lemma, tag, surface))
    for lemma, (vbd, vbn) in sorted(IRREGULAR_VERBS.items()):
        rows.append((lemma, "VB", lemma))
        rows.append((lemma, "VBP", lemma))
        rows.append((lemma, "VBZ", _regular(lemma, "VBZ")))
        rows.append((lemma, "VBG", _regular(lemma, "VBG")))
        rows.append((lemma, "VBD", vbd))
        rows.append((lemma, "VBN", vbn))
    for lemma in sorted(REGULAR_VERBS):
        for tag in ("VB", "VBP", "VBZ", "VBG", "VBD", "VBN"):
            rows.append((lemma, tag, _regular(lemma, tag)))
    return rows


# --- gazetteer --------------------------------------------------------------------

def build_gazetteer() -> list[tuple[str, str, str, str, str]]:
    rows = []
    people = {f"{first} {last}" for first in FIRST_NAMES for last in LAST_NAMES}
    people.update(THREE_TOKEN_PEOPLE)
    people.update(MONONYMS)
    for name in sorted(people):
        rows.append((name, "person", "person", "person", "_"))
    for country, capital, _ in COUNTRIES:
        rows.append((country, "location", "country", "_", "country"))
        rows.append((capital, "location", "city", "_", "city"))
    for continent in CONTINENTS:
        rows.append((continent, "location", "_", "_", "place"))
    for role in ROLES:
        rows.append((role, "_", "_", "_", "role"))
    rows.append(("capital", "_", "_", "_", "place"))
    currencies = sorted({currency for _, _, currency in COUNTRIES})
    for currency in currencies:
        rows.append((currency, "_", "currency", "_", "_"))
        rows.append((currency.capitalize(), "_", "currency", "_", "_"))
    rows.sort()
    return rows


# --- corpus templates ---------------------------------------------------------------

def person_pool(rng: random.Random) -> list[str]:
    names = [f"{rng.choice(FIRST_NAMES)} {rng.choice(LAST_NAMES)}" for _ in range(400)]
    names.extend(THREE_TOKEN_PEOPLE)
    return names


def build_pairs(rng: random.Random, target: int) -> list[dict]:
    people = person_pool(rng)
    pairs: list[dict] = []
    seen: set[tuple[str, str]] = set()

    def emit(sentence: str, question: str, answer: str) -> None:
        key = (sentence, question)
        if key in seen:
            return
        seen.add(key)
        pairs.append(
            {
                "id": f"wiki-{len(pairs) + 1:04d}",
                "sentence": sentence,
                "question": question,
                "answer": answer,
            }
        )

    def country():
        return rng.choice(COUNTRIES)

    templates = [
        lambda: (lambda c, p, r: (
            f"The {r} of {c[0]} is {p}.", f"Who is the {r} of {c[0]}?", p
        ))(country(), rng.choice(people), rng.choice(ROLES)),
        lambda: (lambda c, p, r: (
            f"The {r} of {c[0]} was {p}.", f"Who was the {r} of {c[0]}?", p
        ))(country(), rng.choice(people), rng.choice(ROLES)),
        lambda: (lambda c, p, r, adj: (
            f"The {adj} {r} of {c[0]} is {p}.", f"Who is the {adj} {r} of {c[0]}?", p
        ))(country(), rng.choice(people), rng.choice(ROLES), rng.choice(ADJECTIVES)),
        lambda: (lambda c: (
            f"The capital of {c[0]} is {c[1]}.", f"What is the capital of {c[0]}?", c[1]
        ))(country()),
        lambda: (lambda c, p: (
            f"{p} comes from {c[0]}.", f"Where does {p} come from?", c[0]
        ))(country(), rng.choice(people)),
        lambda: (lambda c, p: (
            f"{p} was born in {c[1]}.", f"Where was {p} born?", c[1]
        ))(country(), rng.choice(people)),
        lambda: (lambda c, p: (
            f"{p} lives in {c[1]}.", f"Where does {p} live?", c[1]
        ))(country(), rng.choice(people)),
        lambda: (lambda c, p, r: (
            f"{p} works as a {r}.", f"Who works as a {r}?", p
        ))(country(), rng.choice(people), rng.choice(ROLES)),
        lambda: (lambda c: (
            f"{c[1]} is located in {c[0]}.", f"Where is {c[1]} located?", c[0]
        ))(country()),
        lambda: (lambda c: (
            f"The largest city in {c[0]} is {c[1]}.",
            f"What is the largest city in {c[0]}?", c[1]
        ))(country()),
        lambda: (lambda c: (
            f"The currency of {c[0]} is the {c[2]}.",
            f"What is the currency of {c[0]}?", c[2]
        ))(country()),
        lambda: (lambda p, s: (
            f"{p} plays {s}.", f"What does {p} play?", s
        ))(rng.choice(people), rng.choice(SPORTS)),
        lambda: (lambda c, p: (
            f"{p} died in {c[1]}.", f"Where did {p} die?", c[1]
        ))(country(), rng.choice(people)),
        lambda: (lambda c, p: (
            f"{p} visited {c[1]}.", f"Who visited {c[1]}?", p
        ))(country(), rng.choice(people)),
        lambda: (lambda c, p: (
            f"{p} is the mayor of {c[1]}.", f"Who is the mayor of {c[1]}?", p
        ))(country(), rng.choice(people)),
        lambda: (lambda a, b: (
            f"{a[0]} borders {b[0]}.", f"What does {a[0]} border?", b[0]
        ))(country(), country()),
        lambda: (lambda c, lm: (
            f"The {lm} stands in {c[1]}.", f"Where does the {lm} stand?", c[1]
        ))(country(), rng.choice(LANDMARKS)),
    ]

    guard = 0
    while len(pairs) < target and guard < target * 50:
        guard += 1
        sentence, question, answer = rng.choice(templates)()
        if sentence.split(" ")[0] == answer.split(" ")[0] and question.startswith("What does"):
            continue  # borders template with identical countries
        emit(sentence, question, answer)
    if len(pairs) < target:
        raise SystemExit(f"could not reach {target} unique pairs (got {len(pairs)})")
    return pairs


# --- writers -------------------------------------------------------------------------

def write_tsv(path: Path, rows) -> None:
    path.write_text("\n".join("\t".join(row) for row in rows) + "\n", encoding="utf-8")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=1200)
    parser.add_argument("--seed", type=int, default=20240601)
    parser.add_argument("--check", action="store_true",
                        help="train on the new corpus and report extraction failures")
    args = parser.parse_args()

    DATA_DIR.mkdir(parents=True, exist_ok=True)
    write_tsv(DATA_DIR / "lexicon.tsv",
              [(w, lemma, pos) for w, (lemma, pos) in sorted(LEXICON.items())])
    write_tsv(DATA_DIR / "gazetteer.tsv", build_gazetteer())
    write_tsv(DATA_DIR / "morphology.tsv", build_morphology())

    rng = random.Random(args.seed)
    pairs = build_pairs(rng, args.pairs)
    with open(DATA_DIR / "training_pairs.jsonl", "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair, ensure_ascii=False, sort_keys=True) + "\n")
    print(f"wrote {len(pairs)} pairs and data tables to {DATA_DIR}")

    if args.check:
        import sys

        sys.path.insert(0, str(DATA_DIR.parent.parent))
        from questgen.providers import default_providers
        from questgen.rules import train

        store = train(pairs, default_providers())
        print(f"check: {len(store)} unique rules, {len(store.failures)} extraction failures")
        for pair_id, reason in store.failures[:20]:
            print(f"  {pair_id}: {reason}")


if __name__ == "__main__":
    main()
