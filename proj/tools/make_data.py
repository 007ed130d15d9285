#!/usr/bin/env python3
"""Regenerates data/lexicon.tsv, data/bootstrap.ndjson and the fixture corpus.

The fixture corpus is 200 items split across fixtures/app_store.ndjson and
fixtures/microblog.ndjson, one file per connector source kind.

Output is deterministic for a given seed, so the committed files can be
checked with `git diff` after a rerun.
"""
import argparse
import json
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

POSITIVE = {
    "good": 0.5, "great": 0.7, "excellent": 0.9, "amazing": 0.8, "awesome": 0.8, "love": 0.8,
    "loved": 0.7, "loves": 0.7, "like": 0.3, "liked": 0.3, "nice": 0.4, "fine": 0.2, "happy": 0.6,
    "glad": 0.5, "helpful": 0.5, "useful": 0.5, "easy": 0.4, "fast": 0.4, "quick": 0.3,
    "smooth": 0.5, "simple": 0.3, "clean": 0.3, "beautiful": 0.6, "perfect": 0.9, "best": 0.8,
    "better": 0.4, "improved": 0.4, "reliable": 0.5, "stable": 0.4, "intuitive": 0.5,
    "fantastic": 0.8, "wonderful": 0.8, "brilliant": 0.8, "enjoy": 0.5, "enjoyed": 0.5,
    "thanks": 0.3, "thank": 0.3, "recommend": 0.5, "pleased": 0.5, "solid": 0.4, "works": 0.2,
    "working": 0.1, "fixed": 0.3, "fix": 0.1, "cool": 0.4, "neat": 0.4, "superb": 0.9,
    "impressive": 0.6, "convenient": 0.4, "handy": 0.4, "polished": 0.5, "responsive": 0.4,
    "worth": 0.3, "favorite": 0.6, "favourite": 0.6, "satisfied": 0.5, "delighted": 0.7,
    "friendly": 0.4, "secure": 0.3, "safe": 0.3, "accurate": 0.4, "flawless": 0.9, "lovely": 0.6,
    "fun": 0.5, "smart": 0.4, "elegant": 0.5, "efficient": 0.4, "appreciate": 0.5, "super": 0.5,
    "wow": 0.5, "yay": 0.5, "win": 0.4, "success": 0.5, "successful": 0.5, "clear": 0.3,
}

NEGATIVE = {
    "bad": -0.5, "terrible": -0.9, "horrible": -0.9, "awful": -0.8, "worst": -0.9, "hate": -0.8,
    "hated": -0.7, "hates": -0.7, "poor": -0.5, "broken": -0.6, "useless": -0.7, "annoying": -0.6,
    "annoyed": -0.5, "slow": -0.4, "laggy": -0.5, "buggy": -0.6, "bug": -0.3, "bugs": -0.3,
    "crash": -0.5, "crashes": -0.5, "crashed": -0.5, "crashing": -0.5, "freeze": -0.4,
    "freezes": -0.4, "frozen": -0.4, "fail": -0.5, "fails": -0.5, "failed": -0.5, "failure": -0.5,
    "error": -0.4, "errors": -0.4, "problem": -0.3, "problems": -0.3, "issue": -0.2,
    "issues": -0.2, "wrong": -0.4, "worse": -0.5, "disappointed": -0.6, "disappointing": -0.6,
    "frustrating": -0.6, "frustrated": -0.6, "unusable": -0.8, "garbage": -0.8, "trash": -0.7,
    "junk": -0.6, "sucks": -0.7, "ugly": -0.5, "confusing": -0.4, "difficult": -0.3, "hard": -0.2,
    "lost": -0.4, "lose": -0.3, "losing": -0.4, "missing": -0.3, "stuck": -0.4, "drain": -0.4,
    "drains": -0.4, "glitch": -0.4, "glitches": -0.4, "unstable": -0.5, "unreliable": -0.5,
    "sad": -0.5, "angry": -0.6, "upset": -0.5, "waste": -0.6, "wasted": -0.6, "refund": -0.4,
    "scam": -0.8, "spam": -0.5, "ads": -0.2, "expensive": -0.3, "overpriced": -0.5, "painful": -0.6,
    "pathetic": -0.8, "ridiculous": -0.6, "nightmare": -0.8, "disaster": -0.8, "unacceptable": -0.7,
    "blank": -0.2, "hangs": -0.4, "timeout": -0.3, "insecure": -0.5, "leak": -0.4, "worried": -0.3,
    "slowly": -0.3, "crashy": -0.6, "lag": -0.4, "lags": -0.4, "bloated": -0.4, "clunky": -0.4,
    "outdated": -0.3, "inaccurate": -0.4, "unresponsive": -0.5, "corrupted": -0.6,
    "rude": -0.5, "mess": -0.5, "regret": -0.6, "hassle": -0.4, "complicated": -0.3,
    "terribly": -0.7, "badly": -0.5, "disappoints": -0.6, "irritating": -0.5, "pointless": -0.6,
}

NEGATORS = [
    "not", "no", "never", "cannot", "cant", "don", "doesn", "didn", "isn", "wasn", "aren",
    "weren", "won", "wouldn", "couldn", "shouldn", "hasn", "haven", "hadn", "nothing", "nobody",
    "neither", "nor", "without", "hardly",
]

PROBLEM_EN = [
    "the app crashes when i open the settings",
    "crashes every time i try to log in",
    "after the update the app freezes on the start screen",
    "cannot upload photos anymore it fails with an error",
    "the sync is broken and my notes are lost",
    "login fails with error code 500 since yesterday",
    "app keeps crashing on my phone after the last update",
    "the screen goes blank when i rotate the device",
    "notifications stopped working after the update",
    "battery drains really fast since the new version",
    "the video player is stuck at loading",
    "payment failed twice and the app charged me anyway",
    "search returns nothing even for exact titles",
    "i lost all my data after updating",
    "the keyboard covers the send button and i cannot send messages",
    "audio is out of sync in every video",
    "the app hangs when exporting to pdf",
    "map does not load and shows a grey screen",
    "dark mode makes the text invisible in settings",
    "the widget shows wrong numbers since the update",
    "sign up button does nothing when tapped",
    "backup restore fails with an unknown error",
    "the app logs me out every few minutes",
    "images are blurry and take forever to load",
    "calendar events are duplicated after sync",
    "crash on startup with the latest version",
    "my downloads disappear after restarting",
    "the timer resets itself randomly",
    "bluetooth connection drops constantly with the app",
    "error when saving changes to my profile",
    "the app is unusable since the redesign it freezes all the time",
    "voice messages fail to play",
]

INQUIRY_EN = [
    "please add a dark mode",
    "would love an option to export my data as csv",
    "can you add support for multiple accounts",
    "how do i change my username",
    "is there a way to sync with my tablet",
    "please add a widget for the home screen",
    "could you add offline mode for travelling",
    "will there be a version for the watch",
    "i wish there was a way to sort by date",
    "please support landscape mode on tablets",
    "how can i reset my password without email",
    "any plans to add two factor authentication",
    "please let us customize the notification sounds",
    "can we get a search filter for tags",
    "would be great to have shared lists with family",
    "is it possible to import from other apps",
    "please add an option to hide read items",
    "how do i cancel my subscription",
    "feature request add a calendar view",
    "can you make the font size adjustable",
    "would like to schedule posts in advance",
    "please add keyboard shortcuts on desktop",
    "is there an api for developers",
    "suggestion allow reordering the menu",
    "could you add more languages like german",
    "please bring back the old layout as an option",
    "how do i move my data to a new phone",
    "can you add a reminder feature",
    "would love integration with my smart speaker",
    "please add split screen support",
    "where can i find the privacy settings",
    "could the app remember my last filter",
]

IRRELEVANT_EN = [
    "love this app five stars",
    "great app thanks",
    "best app ever",
    "good",
    "nice design and very helpful",
    "my daughter uses it every day",
    "just downloaded it looking forward to trying",
    "awesome work team",
    "the weather is lovely today",
    "watching the game tonight with friends",
    "happy friday everyone",
    "this is my favourite app on the phone",
    "excellent and simple to use",
    "works fine for me",
    "ok",
    "wow amazing",
    "coffee first then emails",
    "thanks for the great service",
    "perfect for my morning routine",
    "recommended it to all my friends",
    "cool",
    "beautiful interface love the colors",
    "i use it at work and at home",
    "solid app nothing to complain about",
    "five stars from me",
    "what a nice surprise",
    "lunch was delicious today",
    "the new logo looks neat",
    "fantastic experience so far",
    "been using it for years",
    "really enjoy the clean look",
    "heading to the beach this weekend",
]

# Fixture-only phrasing so the fixture is not a copy of the training corpus.
PROBLEM_EXTRA = [
    "the app crashes when i share a link",
    "uploads fail and the progress bar is stuck",
    "login broken again after the update",
    "freezes when i open the camera",
    "sync error keeps showing up",
    "the app is slow and crashes sometimes",
    "not working at all on my tablet",
    "every update makes it worse it crashes now",
]
INQUIRY_EXTRA = [
    "please add an export option",
    "can you support dark mode on the widget",
    "how do i add a second account",
    "would love a tablet layout",
    "any plans for an offline mode",
    "is there a setting to change the font",
]
IRRELEVANT_EXTRA = [
    "great app",
    "love it",
    "nice",
    "good morning everyone",
    "thanks team",
    "really like it",
]
# Text that mixes classes; these tend to end up near the decision boundary.
MIXED = [
    "great app but please add dark mode",
    "love it but it crashes sometimes",
    "nice update how do i find the settings now",
    "works fine but would love an export option",
    "good app although login is slow",
    "the new design is nice can you add a widget",
    "thanks for the fix but sync still fails",
    "is it normal that it is slow",
]
GERMAN = [
    "die app stürzt beim start ab und friert ein",
    "leider kann ich mich nicht mehr anmelden",
    "bitte einen dunklen modus hinzufügen",
    "die app ist sehr gut und einfach zu bedienen",
    "seit dem update ist alles langsam und voller fehler",
    "wie kann ich mein passwort ändern",
    "toll gemacht danke an das team",
    "die synchronisation funktioniert nicht mit dem tablet",
]


def write_lexicon(path: Path) -> None:
    lines = ["# token<TAB>valence, or token<TAB>NEG for negators"]
    merged = {}
    merged.update(POSITIVE)
    merged.update(NEGATIVE)
    for token in sorted(merged):
        lines.append(f"{token}\t{merged[token]:.2f}")
    for token in NEGATORS:
        lines.append(f"{token}\tNEG")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_bootstrap(path: Path) -> None:
    rows = []
    for label, texts in (("problem_report", PROBLEM_EN), ("inquiry", INQUIRY_EN), ("irrelevant", IRRELEVANT_EN)):
        for i, text in enumerate(texts):
            rows.append({"id": f"boot-{label}-{i:02d}", "text": text, "created_at": "2019-01-01T00:00:00Z",
                         "lang": "en", "label": label})
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")


def write_fixture(out: Path, count: int, seed: int) -> None:
    rng = random.Random(seed)
    start = datetime(2019, 1, 1, tzinfo=timezone.utc)
    pools = [PROBLEM_EXTRA + PROBLEM_EN, INQUIRY_EXTRA + INQUIRY_EN, IRRELEVANT_EXTRA + IRRELEVANT_EN]
    authors = [f"user{n}" for n in range(40)]
    suffixes = ["", "", "", " again", " today", " on android", " on ios", " please", "!!", " :("]
    rows = {"app_store": [], "microblog": []}
    for i in range(count):
        roll = rng.random()
        if roll < 0.08:
            text = rng.choice(GERMAN)
        elif roll < 0.2:
            text = rng.choice(MIXED)
        else:
            text = rng.choice(pools[rng.randrange(3)])
        text = text + rng.choice(suffixes)
        source = "app_store" if rng.random() < 0.6 else "microblog"
        created = start + timedelta(seconds=rng.randrange(0, 364 * 86400))
        row = {"id": f"{source[:2]}-{i:04d}", "text": text,
               "created_at": created.strftime("%Y-%m-%dT%H:%M:%SZ")}
        if source == "app_store":
            row["rating"] = rng.randint(1, 5)
        if rng.random() < 0.8:
            row["author"] = rng.choice(authors)
        rows[source].append(row)
    for source, items in rows.items():
        text = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in items)
        (out / f"{source}.ndjson").write_text(text, encoding="utf-8")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "data")
    parser.add_argument("--seed", type=int, default=2019)
    args = parser.parse_args()
    (args.out / "fixtures").mkdir(parents=True, exist_ok=True)
    write_lexicon(args.out / "lexicon.tsv")
    write_bootstrap(args.out / "bootstrap.ndjson")
    write_fixture(args.out / "fixtures", 200, args.seed)


if __name__ == "__main__":
    main()
