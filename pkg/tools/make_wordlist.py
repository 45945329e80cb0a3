#!/usr/bin/env python3
"""Build the bundled frequency word list and the 500-word probe sample.

The list is a curated core of the most common English words (in rough
frequency order) followed by words harvested from installed-package prose
(dist-info metadata and stdlib docstrings), ordered by descending frequency.
Run once; outputs are committed under src/retok/data/.
"""

from __future__ import annotations

import re
import sysconfig
from collections import Counter
from pathlib import Path
from random import Random

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "retok" / "data"
TARGET_SIZE = 10_000
PROBE_SIZE = 500

# Rough frequency-ordered core of everyday English. The harvested tail below
# fills in the rest; this core pins the words every English list should have.
CORE = """
the of and to a in is you that it he was for on are as with his they i at be
this have from or one had by word but not what all were we when your can said
there use an each which she do how their if will up other about out many then
them these so some her would make like him into time has look two more write
go see number no way could people my than first water been call who its now
find long down day did get come made may part over new sound take only little
work know place year live me back give most very after thing our just name
good sentence man think say great where help through much before line right
too mean old any same tell boy follow came want show also around form three
small set put end does another well large must big even such because turn
here why ask went men read need land different home us move try kind hand
picture again change off play spell air away animal house point page letter
mother answer found study still learn should america world high every near
add food between own below country plant last school father keep tree never
start city earth eye light thought head under story saw left don't few while
along might close something seem next hard open example begin life always
those both paper together got group often run important until children side
feet car mile night walk white sea began grow took river four carry state
once book hear stop without second late miss idea enough eat face watch far
really almost let above girl sometimes mountain cut young talk soon list song
being leave family body music color stand sun questions fish area mark dog
horse birds problem complete room knew since ever piece told usually didn't
friends easy heard order red door sure become top ship across today during
short better best however low hours black products happened whole measure
remember early waves reached listen wind rock space covered fast several hold
himself toward five step morning passed vowel true hundred against pattern
numeral table north slowly money map farm pulled draw voice seen cold cried
plan notice south sing war ground fall king town unit figure certain field
travel wood fire upon done english road half ten fly gave box finally wait
correct oh quickly person became shown minutes strong verb stars front feel
fact inches street decided contain course surface produce building ocean
class note nothing rest carefully scientists inside wheels stay green known
island week less machine base ago stood plane system behind ran round boat
game force brought understand warm common bring explain dry though language
shape deep thousands yes clear equation yet government filled heat full hot
check object am rule among noun power cannot able six size dark ball material
special heavy fine pair circle include built can't matter square syllables
perhaps bill felt suddenly test direction center farmers ready anything
divided general energy subject europe moon region return believe dance
members picked simple cells paint mind love cause rain exercise eggs train
blue wish drop developed window difference distance heart sit sum summer wall
forest probably legs sat main winter wide written length reason kept interest
arms brother race present beautiful store job edge past sign record finished
discovered wild happy beside gone sky glass million west lay weather root
instruments meet third months paragraph raised represent soft whether clothes
flowers shall teacher held describe drive cross speak solve appear metal son
either ice sleep village factors result jumped snow ride care floor hill
pushed baby buy century outside everything tall already instead phrase soil
bed copy free hope spring case laughed nation quite type themselves temperature
bright lead everyone method section lake consonant within dictionary guests
enjoy recipe cooking kitchen garden thank please welcome friend visit share
"""

WORD_RE = re.compile(r"[A-Za-z]+")


def harvest_counts() -> Counter:
    counts: Counter = Counter()

    def feed(text: str):
        for match in WORD_RE.finditer(text):
            word = match.group().lower()
            if word.isascii():
                counts[word] += 1

    site = Path(sysconfig.get_paths()["purelib"])
    for metadata in sorted(site.glob("*.dist-info/METADATA")):
        try:
            feed(metadata.read_text(encoding="utf-8", errors="ignore"))
        except OSError:
            continue

    import importlib
    import inspect

    stdlib_modules = [
        "abc", "argparse", "ast", "asyncio", "base64", "bisect", "calendar",
        "collections", "concurrent.futures", "configparser", "contextlib",
        "copy", "csv", "dataclasses", "datetime", "decimal", "difflib", "dis",
        "doctest", "email", "enum", "fileinput", "fnmatch", "fractions",
        "functools", "gettext", "glob", "gzip", "hashlib", "heapq", "hmac",
        "html", "http", "imaplib", "inspect", "io", "ipaddress", "itertools",
        "json", "locale", "logging", "math", "mimetypes", "multiprocessing",
        "netrc", "numbers", "operator", "os", "pathlib", "pdb", "pickle",
        "pkgutil", "platform", "plistlib", "pprint", "profile", "queue",
        "random", "re", "sched", "secrets", "select", "shelve", "shlex",
        "shutil", "signal", "smtplib", "socket", "sqlite3", "ssl",
        "statistics", "string", "struct", "subprocess", "tarfile", "tempfile",
        "textwrap", "threading", "time", "timeit", "tokenize", "traceback",
        "types", "typing", "unicodedata", "unittest", "urllib.request",
        "uuid", "warnings", "weakref", "webbrowser", "xml.dom", "zipfile",
    ]
    for name in stdlib_modules:
        try:
            module = importlib.import_module(name)
        except ImportError:
            continue
        feed(module.__doc__ or "")
        for _, member in inspect.getmembers(module):
            doc = getattr(member, "__doc__", None)
            if isinstance(doc, str):
                feed(doc)
    return counts


def main():
    core = [w for w in CORE.split() if w]
    seen = set()
    words: list[str] = []
    for word in core:
        word = word.strip().lower()
        if word and word not in seen:
            seen.add(word)
            words.append(word)

    counts = harvest_counts()
    harvested = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    for word, count in harvested:
        if len(words) >= TARGET_SIZE:
            break
        if count < 2 or word in seen:
            continue
        seen.add(word)
        words.append(word)

    OUT_DIR.mkdir(parents=True, exist_ok=True)
    (OUT_DIR / "wordlist.txt").write_text("\n".join(words) + "\n", encoding="utf-8")
    print(f"wordlist.txt: {len(words)} words")

    rng = Random(2024)
    candidates = [w for w in words if 4 <= len(w) <= 12]
    probe = rng.sample(candidates, PROBE_SIZE)
    (OUT_DIR / "probe_words.txt").write_text("\n".join(probe) + "\n", encoding="utf-8")
    print(f"probe_words.txt: {len(probe)} words")


if __name__ == "__main__":
    main()
