#!/usr/bin/env python3
"""Regenerates the bundled data under data/.

  data/votes/corpus.jsonl  conclusion snippets {case_id, formation, text}
  data/votes/gold.jsonl    hand-checked vote records for the snippets
  data/toy/*               a small synthetic prediction/vote/proxy dataset

Output is deterministic; rerun only when the generator changes.
"""

import json
import math
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
WORDS = ["zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
         "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen"]
BENCH = {"COMMITTEE": 3, "CHAMBER": 7, "GRANDCHAMBER": 17}
ARTICLES = [2, 3, 5, 6, 8, 9, 10, 11, 14]


def num(n, style):
    return WORDS[n] if style == "words" else str(n)


def clause(article, vv, vnv, found, form, style, comma=True, suffix=" of the Convention", para=""):
    """Renders one "Holds ..." clause; returns (text, gold record)."""
    majority, minority = (vv, vnv) if found else (vnv, vv)
    art = f"Article {article}{para}"
    if form == "unanimous":
        head = "Holds unanimously that "
    elif comma:
        head = f"Holds, by {num(majority, style)} votes to {num(minority, style)}, that "
    else:
        head = f"Holds by {num(majority, style)} votes to {num(minority, style)} that "
    if form == "article_first" or (form == "unanimous" and style == "article_first"):
        body = f"{art}{suffix} has {'' if found else 'not '}been violated"
    else:
        body = f"there has been {'a' if found else 'no'} violation of {art}{suffix}"
    return head + body, {"article": article, "votes_violation": vv, "votes_noviolation": vnv,
                         "found_violation": found}


def split_votes(rng, size, found):
    minority = rng.choice([1, 1, 1, 2, 3]) if size > 3 else 1
    minority = min(minority, (size - 1) // 2)
    majority = size - minority
    return (majority, minority) if found else (minority, majority)


def build_corpus():
    rng = random.Random(20240601)
    docs, gold = [], []
    filler_open = ["FOR THESE REASONS, THE COURT", "For these reasons, the Court", "FOR THESE REASONS, THE COURT,"]
    n = 0
    combos = []
    for form in ["finding_first", "article_first", "unanimous"]:
        for style in ["words", "digits"]:
            for formation in ["CHAMBER", "CHAMBER", "GRANDCHAMBER", "COMMITTEE"]:
                combos.append((form, style, formation))
    combos = combos * 2
    rng.shuffle(combos)
    for form, style, formation in combos[:38]:
        n += 1
        case_id = f"case-{n:03d}"
        size = BENCH[formation]
        clauses = []
        n_clauses = rng.choice([1, 1, 2, 3])
        used = set()
        for k in range(n_clauses):
            article = rng.choice([a for a in ARTICLES if a not in used])
            used.add(article)
            found = rng.random() < 0.6
            if form == "unanimous" and formation == "COMMITTEE":
                vv, vnv = (size, 0) if found else (0, size)
            elif form == "unanimous" or (k > 0 and rng.random() < 0.5):
                vv, vnv = (size, 0) if found else (0, size)
                text, rec = clause(article, vv, vnv, found, "unanimous",
                                   "article_first" if rng.random() < 0.3 else style,
                                   para=rng.choice(["", "", " § 1"]))
                clauses.append((text, rec))
                continue
            else:
                vv, vnv = split_votes(rng, size, found)
            if form == "unanimous":
                text, rec = clause(article, vv, vnv, found, "unanimous", style)
            else:
                text, rec = clause(article, vv, vnv, found, form, style, comma=rng.random() < 0.7,
                                   para=rng.choice(["", "", " § 1", " §§ 1 and 4"]) if article in (5, 6) else "")
            clauses.append((text, rec))
        parts = [rng.choice(filler_open), "1. Declares the application admissible;"]
        for i, (text, rec) in enumerate(clauses, start=2):
            parts.append(f"{i}. {text};")
            gold.append({"case_id": case_id, **rec})
        if rng.random() < 0.4:
            parts.append(f"{len(clauses) + 2}. Holds that the respondent State is to pay the applicant, "
                         "within three months, EUR 5,000 (five thousand euros) in respect of non-pecuniary damage;")
        parts.append("Done in English, and notified in writing.")
        sep = rng.choice(["\n", " ", "\n\n", "  "])
        text = sep.join(parts)
        if rng.random() < 0.2:
            text = text.upper()
        docs.append({"case_id": case_id, "formation": formation, "text": text})

    # Hand-written variants: Protocol articles, Grand Chamber splits, no-break spaces.
    extra = [
        ("case-039", "GRANDCHAMBER",
         "3. Holds, by sixteen votes to one, that there has been a violation of Article 8 of the Convention;\n"
         "4. Holds, by twelve votes to five, that there has been no violation of Article 1 of Protocol No. 1;",
         [{"article": 8, "votes_violation": 16, "votes_noviolation": 1, "found_violation": True}]),
        ("case-040", "CHAMBER",
         "2. Holds by 4 votes to 3 that Article 10 of the Convention has been violated;",
         [{"article": 10, "votes_violation": 4, "votes_noviolation": 3, "found_violation": True}]),
        ("case-041", "GRANDCHAMBER",
         "5. Holds, by nine votes to eight, that there has been no violation of Article 3 of the Convention;",
         [{"article": 3, "votes_violation": 8, "votes_noviolation": 9, "found_violation": False}]),
        ("case-042", "CHAMBER",
         "1. Holds unanimously that there has been a violation of Article 6 § 1 of the Convention;\n"
         "2. Holds, by five votes to two, that Article 14 of the Convention has not been violated;",
         [{"article": 6, "votes_violation": 7, "votes_noviolation": 0, "found_violation": True},
          {"article": 14, "votes_violation": 2, "votes_noviolation": 5, "found_violation": False}]),
    ]
    for case_id, formation, text, recs in extra:
        docs.append({"case_id": case_id, "formation": formation, "text": text})
        gold.extend({"case_id": case_id, **r} for r in recs)

    distractors = [
        "The applicant lodged a complaint with the Court under Article 34 of the Convention.",
        "The Government contested that argument and maintained that there has been no violation.",
        "Holds that the respondent State is to pay the applicant EUR 3,000 in respect of costs and expenses;",
        "Dismisses the remainder of the applicant's claim for just satisfaction.",
        "The Chamber decided, by six votes to one, to relinquish jurisdiction in favour of the Grand Chamber.",
    ]
    for i, text in enumerate(distractors, start=1):
        docs.append({"case_id": f"distractor-{i}", "formation": "CHAMBER", "text": text})
    return docs, gold


def build_toy():
    rng = random.Random(7)
    preds, soft, null, votes, proxies = [], [], [], [], []
    n_cases = 240
    base_rate = {}
    for c in range(n_cases):
        case_id = f"001-{100000 + c}"
        split = "train" if c < 120 else ("dev" if c < 180 else "test")
        formation = rng.choices(["CHAMBER", "GRANDCHAMBER", "COMMITTEE"], weights=[80, 8, 12])[0]
        size = BENCH[formation]
        high_rep = rng.random() < 0.4
        key_case = rng.random() < 0.15
        proxies.append({"case_id": case_id, "GrandChamber": int(formation == "GRANDCHAMBER"),
                        "HighRepCountry": int(high_rep), "KeyCase": int(key_case)})
        for article in rng.sample(ARTICLES, rng.choice([1, 1, 2, 2, 3])):
            found = rng.random() < 0.62
            sv_prob = 0.0 if formation == "COMMITTEE" else (0.35 if high_rep else 0.15)
            if rng.random() < sv_prob:
                vv, vnv = split_votes(rng, size, found)
            else:
                vv, vnv = (size, 0) if found else (0, size)
            votes.append({"case_id": case_id, "article": article, "votes_violation": vv,
                          "votes_noviolation": vnv, "found_violation": found})
            gold = 1 if found else 0
            split_vote = 0 < vv < size
            # Overconfident classifier: margins about three times too large, noisier on split votes.
            signal = (1.0 if gold else -1.0) * (0.4 if split_vote else 1.2) + rng.gauss(0.0, 1.0)
            z = 8.0 * signal
            preds.append({"case_id": case_id, "article": article, "logits": [0.0, round(z, 6)],
                          "gold": gold, "alleged": True, "split": split})
            zs = 0.6 * signal + rng.gauss(0.0, 0.3)
            soft.append({"case_id": case_id, "article": article, "logits": [0.0, round(zs, 6)],
                         "gold": gold, "alleged": True, "split": split})
            base_rate.setdefault(article, []).append(gold)
            null.append((case_id, article, gold, split))
    null_records = []
    for case_id, article, gold, split in null:
        rate = sum(base_rate[article]) / len(base_rate[article])
        rate = min(max(rate, 0.05), 0.95)
        null_records.append({"case_id": case_id, "article": article,
                             "logits": [0.0, round(math.log(rate / (1.0 - rate)), 6)],
                             "gold": gold, "alleged": True, "split": split})
    return preds, soft, null_records, votes, proxies


def write_jsonl(path, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    docs, gold = build_corpus()
    write_jsonl(ROOT / "data/votes/corpus.jsonl", docs)
    write_jsonl(ROOT / "data/votes/gold.jsonl", gold)

    preds, soft, null, votes, proxies = build_toy()
    write_jsonl(ROOT / "data/toy/predictions.jsonl", preds)
    write_jsonl(ROOT / "data/toy/predictions_soft.jsonl", soft)
    write_jsonl(ROOT / "data/toy/predictions_null.jsonl", null)
    write_jsonl(ROOT / "data/toy/votes.jsonl", votes)
    with open(ROOT / "data/toy/proxies.csv", "w", encoding="utf-8") as f:
        f.write("case_id,GrandChamber,HighRepCountry,KeyCase\n")
        for p in proxies:
            f.write(f"{p['case_id']},{p['GrandChamber']},{p['HighRepCountry']},{p['KeyCase']}\n")
    print(f"{len(docs)} conclusion documents, {len(gold)} gold votes, {len(preds)} toy pairs")


if __name__ == "__main__":
    main()
