#!/usr/bin/env python3
# Copyright 2026 The semtag Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates the toy COGS-format corpus under data/toy.

train.tsv and dev.tsv hold in-distribution sentences whose objects carry at
most two stacked prepositional phrases. heldout.tsv holds subject/object
noun pairings never seen in training and objects carrying three stacked
prepositional phrases.
"""

import argparse
import itertools
import pathlib
import random

ANIMATE = ["cat", "dog", "girl", "boy"]
NAMES = ["Emma", "Liam"]
THINGS = ["cake", "ball"]
PLACES = ["table", "box", "mat"]
TRANSITIVE = {"liked": "like", "saw": "see", "found": "find"}
INTRANSITIVE = {"smiled": "smile", "slept": "sleep"}
PREPOSITIONS = ["on", "in"]
HELDOUT_PAIRS = {("dog", "cake"), ("girl", "ball"), ("cat", "box"), ("boy", "mat")}


class Builder:
    def __init__(self):
        self.tokens = []
        self.definites = []
        self.atoms = []

    def np(self, head, det):
        """Appends a noun phrase and returns its term."""
        if det is None:
            self.tokens.append(head)
            return head
        self.tokens.append(det)
        pos = len(self.tokens)
        self.tokens.append(head)
        if det.lower() == "the":
            self.definites.append(f"* {head} ( x _ {pos} )")
        else:
            self.atoms.append(f"{head} ( x _ {pos} )")
        return f"x _ {pos}"

    def verb(self, surface):
        pos = len(self.tokens)
        self.tokens.append(surface)
        return pos

    def role(self, pred, role, head_pos, arg):
        self.atoms.append(f"{pred} . {role} ( x _ {head_pos} , {arg} )")

    def render(self):
        self.tokens.append(".")
        body = " AND ".join(self.atoms)
        lf = " ; ".join(self.definites + [body]) if self.definites else body
        return " ".join(self.tokens), lf


def capitalize(det):
    return det[0].upper() + det[1:]


def sentence(subj, verb, obj, pps, rng):
    """subj/obj are nouns or names; pps is a list of (prep, place)."""
    b = Builder()
    if subj in NAMES:
        s = b.np(subj, None)
    else:
        s = b.np(subj, capitalize(rng.choice(["the", "a"])))
    if verb in INTRANSITIVE:
        v = b.verb(verb)
        b.role(INTRANSITIVE[verb], "agent", v, s)
        return b.render()
    v = b.verb(verb)
    pred = TRANSITIVE[verb]
    b.role(pred, "agent", v, s)
    o = b.np(obj, None if obj in NAMES else rng.choice(["the", "a"]))
    b.role(pred, "theme", v, o)
    head, head_term = obj, o
    for prep, place in pps:
        b.tokens.append(prep)
        p = b.np(place, rng.choice(["the", "a"]))
        b.atoms.append(f"{head} . nmod . {prep} ( {head_term} , {p} )")
        head, head_term = place, p
    return b.render()


def noun_of(x):
    return None if x in NAMES else x


def pp_chains(obj, depth):
    """All chains of `depth` (prep, place) pairs with no noun repeated next to itself."""
    if depth == 0:
        yield ()
        return
    for rest in pp_chains(obj, depth - 1):
        prev = rest[-1][1] if rest else obj
        for prep, place in itertools.product(PREPOSITIONS, PLACES):
            if place != prev:
                yield rest + ((prep, place),)


def in_distribution_space():
    subjects = ANIMATE + NAMES
    objects = ANIMATE + NAMES + THINGS + PLACES
    for s in subjects:
        for v in INTRANSITIVE:
            yield (s, v, None, ())
        for v in TRANSITIVE:
            for o in objects:
                if o == s or (s, o) in HELDOUT_PAIRS:
                    continue
                for depth in range(0, 1 if o in NAMES else 3):
                    yield from ((s, v, o, pps) for pps in pp_chains(o, depth))


def features_of(frame):
    """Word-in-role features; every one must be covered by training."""
    s, v, o, pps = frame
    out = [("subj", s), ("verb", v)]
    if o:
        out.append(("obj", o))
    for prep, place in pps:
        out += [("prep", prep), ("place", place)]
    return out


def depth_of(frame):
    return len(frame[3])


def pick_train(space, size, min_count, rng):
    """Depth-stratified sample topped up so every word-in-role occurs min_count times."""
    by_feature = {}
    for frame in space:
        for f in set(features_of(frame)):
            by_feature.setdefault(f, []).append(frame)
    chosen, counts = [], {}

    def add(frame):
        chosen.append(frame)
        for f in features_of(frame):
            counts[f] = counts.get(f, 0) + 1

    for f in sorted(by_feature):
        while counts.get(f, 0) < min_count and len(chosen) < size:
            frame = rng.choice(by_feature[f])
            if frame not in chosen:
                add(frame)
    by_depth = {}
    for frame in space:
        by_depth.setdefault(depth_of(frame), []).append(frame)
    depths = sorted(by_depth)
    while len(chosen) < size:
        frame = rng.choice(by_depth[depths[len(chosen) % len(depths)]])
        if frame not in chosen:
            add(frame)
    rng.shuffle(chosen)
    return chosen


def pick_dev(space, exclude, size, rng):
    """Depth-stratified sample disjoint from training."""
    by_depth = {}
    for frame in space:
        if frame not in exclude:
            by_depth.setdefault(depth_of(frame), []).append(frame)
    depths = sorted(by_depth)
    picked = []
    for i in range(size):
        pool = by_depth[depths[i % len(depths)]]
        picked.append(pool.pop(rng.randrange(len(pool))))
    return picked


def write(path, rows):
    with open(path, "w") as f:
        for sent, lf, cat in rows:
            f.write(f"{sent}\t{lf}\t{cat}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data/toy")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--train", type=int, default=50)
    ap.add_argument("--dev", type=int, default=60)
    args = ap.parse_args()
    rng = random.Random(args.seed)

    space = list(in_distribution_space())
    train_frames = pick_train(space, args.train, 3, rng)
    dev_frames = pick_dev(space, train_frames, args.dev, rng)

    train = [sentence(*frame, rng) + ("in_distribution",) for frame in train_frames]
    dev = [sentence(*frame, rng) + ("in_distribution",) for frame in dev_frames]

    heldout = []
    for s, o in sorted(HELDOUT_PAIRS):
        v = rng.choice(sorted(TRANSITIVE))
        heldout.append(sentence(s, v, o, (), rng) + ("subj_obj_recombination",))
        heldout.append(sentence(s, v, o, ((rng.choice(PREPOSITIONS), rng.choice(
            [p for p in PLACES if p != o])),), rng) + ("subj_obj_recombination",))
    for _ in range(12):
        s = rng.choice(ANIMATE + NAMES)
        v = rng.choice(sorted(TRANSITIVE))
        o = rng.choice([x for x in ANIMATE + THINGS + PLACES if x != s])
        pps = rng.choice(list(pp_chains(o, 3)))
        heldout.append(sentence(s, v, o, pps, rng) + ("pp_recursion",))

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write(out / "train.tsv", train)
    write(out / "dev.tsv", dev)
    write(out / "heldout.tsv", heldout)


if __name__ == "__main__":
    main()
