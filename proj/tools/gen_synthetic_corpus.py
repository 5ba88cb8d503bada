#!/usr/bin/env python3
"""Generate the bundled synthetic corpus (500 articles, November 2023).

Articles are drawn from a fixed set of story lines. Each story has its own
concepts and vocabulary, so propagation graphs and topic models have real
structure to find, and publishers cover known and unknown barrier labels.
Output is deterministic for a given seed.

    python3 tools/gen_synthetic_corpus.py --out data/corpora/synthetic_500.jsonl
"""

import argparse
import json
import random
from datetime import datetime, timedelta, timezone

PUBLISHERS = [
    "The Jerusalem Herald", "Tel Aviv Daily", "Moscow Courier", "Algiers Morning Post",
    "Kingston Gleaner Review", "Washington Ledger", "New York Sentinel", "Heartland Tribune",
    "London Chronicle", "The British Observer Weekly", "Doha Network", "Berlin Rundschau",
    "Paris Dispatch", "Delhi Times Online", "Ankara Gazette", "Cairo Evening News",
    "Rio Correspondent", "Tokyo Shimbun English", "Johannesburg Mail", "Tehran Bulletin",
    "Beijing Global Review", "Riyadh Observer", "Kyiv Independent Wire", "Beirut Star",
    "Lagos Guardian Online", "Sydney Harbour Post", "Toronto Statesman",
    # Not in publishers.csv: these land in the Unknown label.
    "Independent Blogger Network", "Regional Wire Service", "Anonymous Digest",
]

# (name, first day, last day, core concepts, angles, vocabulary, tone)
STORIES = [
    ("hostage talks", 1, 14, ["Hostage negotiation", "Qatar", "Hamas"],
     [["Red Cross"], ["Prisoner exchange"]],
     "negotiators hostages release families mediators exchange prisoners deal talks captives",
     "hope"),
    ("hospital siege", 3, 18, ["Al-Shifa Hospital", "Gaza City", "Israel Defense Forces"],
     [["World Health Organization"], ["Medical supplies"]],
     "hospital patients doctors siege generators incubators fuel wards surgeons evacuation",
     "grim"),
    ("humanitarian truce", 20, 30, ["Ceasefire", "Humanitarian aid", "Rafah Border Crossing"],
     [["United Nations"], ["Egypt"]],
     "truce pause convoys trucks crossing deliveries extension border shelters supplies",
     "hope"),
    ("campus protests", 2, 28, ["Protest", "University", "Freedom of speech"],
     [["Antisemitism"], ["Islamophobia"]],
     "students campus rally banners faculty chants encampment petitions speakers marchers",
     "mixed"),
    ("oil markets", 1, 30, ["Petroleum", "OPEC", "Brent Crude"],
     [["Saudi Arabia"], ["Strait of Hormuz"]],
     "barrel prices traders futures output supply markets tanker refineries benchmark",
     "mixed"),
    ("red sea shipping", 15, 30, ["Houthis", "Red Sea", "Maritime security"],
     [["Galaxy Leader"], ["Bab-el-Mandeb"]],
     "vessel cargo ship seized crew insurers shipping lanes freighter navy patrol",
     "grim"),
    ("ukraine front", 1, 30, ["Russo-Ukrainian War", "Avdiivka", "Armed Forces of Ukraine"],
     [["Drone warfare"], ["Artillery"]],
     "frontline trenches brigades shelling drones offensive artillery positions winter troops",
     "grim"),
    ("west bank raids", 5, 25, ["West Bank", "Jenin", "Israeli settlement"],
     [["Palestinian Authority"], ["Settler violence"]],
     "raids settlers villages checkpoints arrests olive groves curfew clashes refugees camp",
     "grim"),
    ("lebanon border", 8, 30, ["Hezbollah", "Blue Line", "Southern Lebanon"],
     [["UNIFIL"], ["Evacuation"]],
     "border rockets shelling villages residents evacuation peacekeepers ridge exchanges fire",
     "grim"),
    ("diplomatic summit", 10, 22, ["Arab League", "Organisation of Islamic Cooperation", "Riyadh"],
     [["Two-state solution"], ["Diplomacy"]],
     "summit leaders communique delegations foreign ministers resolution statement envoys",
     "hope"),
    ("aid funding", 6, 26, ["UNRWA", "Humanitarian aid", "European Union"],
     [["Donor conference"], ["Refugee"]],
     "donors funding pledges agencies budget appeal contributions relief warehouses grants",
     "hope"),
    ("tech sector", 1, 30, ["Technology", "Start-up company", "Venture capital"],
     [["Reservists"], ["Semiconductor"]],
     "startups engineers investors funding rounds chips reservists founders valuations",
     "mixed"),
]

POSITIVE = ["peace", "hope", "support", "relief", "agreement", "welcome", "safe", "help",
            "success", "praise", "rescue", "growth", "optimistic"]
NEGATIVE = ["war", "attack", "killed", "crisis", "violence", "fear", "destroyed", "tragedy",
            "condemn", "protest", "grief", "pessimistic"]
INTENSIFIERS = ["very", "extremely", "deeply", "hugely"]
NEGATIONS = ["not", "never", "no"]

TEMPLATES = [
    "{Subj} reported {w1} and {w2} as {s1} grew on {day}.",
    "Officials said the {w1} would {neg}bring {s1} to the {w2}.",
    "Witnesses described {int} {s1} near the {w1}.",
    "The {w1} remained at the centre of {s1} and {s2}.",
    "Analysts expect more {w1} and {w2} in coming days.",
    "Local groups voiced {s1} over {w1}.",
    "A spokesperson called the {w1} a sign of {s1}.",
    "Observers noted {w2} alongside {int} {s2}.",
    "Reports from the {w1} suggested {s1}.",
    "Dr. Haddad told reporters the {w2} was {neg}a cause for {s1}.",
]


def tone_words(rng, tone):
    if tone == "hope":
        pool = POSITIVE * 3 + NEGATIVE
    elif tone == "grim":
        pool = NEGATIVE * 3 + POSITIVE
    else:
        pool = POSITIVE + NEGATIVE
    return rng.choice(pool), rng.choice(pool)


def sentence(rng, vocab, tone, day):
    w1, w2 = rng.sample(vocab, 2)
    s1, s2 = tone_words(rng, tone)
    return rng.choice(TEMPLATES).format(
        Subj=w1.capitalize(), w1=w1, w2=w2, s1=s1, s2=s2, day=day,
        int=rng.choice(INTENSIFIERS) if rng.random() < 0.4 else "",
        neg=(rng.choice(NEGATIONS) + " ") if rng.random() < 0.25 else "",
    ).replace("  ", " ")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2023)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    base = datetime(2023, 11, 1, tzinfo=timezone.utc)
    records = []
    for n in range(args.count):
        name, first, last, core, angles, vocab, tone = STORIES[n % len(STORIES)]
        vocab = vocab.split()
        angle = rng.randrange(len(angles))
        day = rng.randint(first, last)
        when = base + timedelta(days=day - 1, seconds=rng.randrange(86400))
        concepts = [[c, round(rng.uniform(0.6, 1.0), 3)] for c in core]
        concepts += [[c, round(rng.uniform(0.7, 1.0), 3)] for c in angles[angle]]
        # Background concepts shared across stories keep similarity imperfect.
        if rng.random() < 0.5:
            concepts.append([rng.choice(["Middle East", "Geopolitics", "Journalism"]),
                             round(rng.uniform(0.05, 0.25), 3)])
        rng.shuffle(concepts)
        sentences = [sentence(rng, vocab, tone, when.strftime("%A"))
                     for _ in range(rng.randint(4, 8))]
        body = " ".join(sentences) if rng.random() > 0.02 else ""
        title = f"{name.title()}: {' '.join(rng.sample(vocab, 3))} {rng.choice(POSITIVE + NEGATIVE)}"
        records.append({
            "id": f"syn-{n:04d}",
            "title": title,
            "body": body,
            "source_name": rng.choice(PUBLISHERS),
            "published_at": when.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "concepts": concepts,
            "categories": ["Israel-Hamas War"] if n % len(STORIES) < 4 else [name.title()],
        })
    records.sort(key=lambda r: (r["published_at"], r["id"]))
    with open(args.out, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
