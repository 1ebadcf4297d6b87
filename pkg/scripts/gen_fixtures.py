#!/usr/bin/env python3
"""Regenerate the committed synthetic fixtures under data/.

Everything is derived from a fixed RNG seed so reruns are reproducible.
The corpora are small but exercise every tracking path: span extraction,
integer values written as words, boolean and text candidates, dontcare,
requested slots, intent switches mid-dialogue, multi-service dialogues,
and phone numbers that must be masked.
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path
import sys

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sgdst.examples import MrcExample, WdExample, dump_examples_jsonl  # noqa: E402
from sgdst.numwords import number_to_words  # noqa: E402
from sgdst.wd import WIDE_DIM  # noqa: E402

SEED = 20260814

SCHEMA = [
    {
        "service_name": "Cafes_1",
        "description": "Find cafes and reserve tables",
        "slots": [
            {"name": "cafe_name", "description": "name of the cafe", "is_categorical": False},
            {
                "name": "neighborhood",
                "description": "part of town the cafe is in",
                "is_categorical": True,
                "possible_values": ["Downtown", "Mission", "Harbor"],
            },
            {
                "name": "party_size",
                "description": "number of people in the party",
                "is_categorical": True,
                "possible_values": ["1", "2", "3", "4", "5", "6"],
            },
            {
                "name": "outdoor_seating",
                "description": "whether seating outside is wanted",
                "is_categorical": True,
                "possible_values": ["True", "False"],
            },
        ],
        "intents": [
            {
                "name": "FindCafe",
                "description": "search for a cafe to visit",
                "required_slots": [],
                "optional_slots": ["neighborhood", "outdoor_seating"],
            },
            {
                "name": "BookCafe",
                "description": "reserve a table at a cafe",
                "required_slots": ["cafe_name", "party_size"],
                "optional_slots": ["outdoor_seating"],
            },
        ],
    },
    {
        "service_name": "Rides_1",
        "description": "Book taxi rides around town",
        "slots": [
            {"name": "destination", "description": "where the ride should go", "is_categorical": False},
            {
                "name": "num_riders",
                "description": "how many riders",
                "is_categorical": True,
                "possible_values": ["1", "2", "3", "4"],
            },
            {
                "name": "ride_type",
                "description": "kind of ride to book",
                "is_categorical": True,
                "possible_values": ["Regular", "Luxury", "Pool"],
            },
            {"name": "fare", "description": "cost of the ride", "is_categorical": False},
        ],
        "intents": [
            {
                "name": "GetRide",
                "description": "order a taxi ride",
                "required_slots": ["destination"],
                "optional_slots": ["num_riders", "ride_type"],
            }
        ],
    },
    {
        "service_name": "Payments_1",
        "description": "Send and request money",
        "slots": [
            {
                "name": "receiver_name",
                "description": "person to exchange money with",
                "is_categorical": False,
            },
            {
                "name": "amount",
                "description": "amount of money in dollars",
                "is_categorical": True,
                "possible_values": ["5", "10", "15", "20", "25", "40", "50", "75", "100"],
            },
            {
                "name": "private_visibility",
                "description": "whether the transaction is private",
                "is_categorical": True,
                "possible_values": ["True", "False"],
            },
        ],
        "intents": [
            {
                "name": "SendMoney",
                "description": "send money to a contact",
                "required_slots": ["receiver_name", "amount"],
                "optional_slots": ["private_visibility"],
            },
            {
                "name": "RequestMoney",
                "description": "request money from a contact",
                "required_slots": ["receiver_name", "amount"],
                "optional_slots": ["private_visibility"],
            },
        ],
    },
    {
        "service_name": "Shirts_1",
        "description": "Order shirts",
        "slots": [
            {
                "name": "color",
                "description": "shirt color",
                "is_categorical": True,
                "possible_values": ["red", "blue"],
            }
        ],
        "intents": [
            {
                "name": "BuyShirt",
                "description": "order a shirt",
                "required_slots": [],
                "optional_slots": ["color"],
            }
        ],
    },
]

CAFE_NAMES = ["Blue Bottle", "Ritual Roasters", "Grand Mill", "Velvet Bean", "Copper Kettle"]
DESTINATIONS = ["the airport", "Union Square", "the main library", "Ocean Beach", "the art museum"]
RECEIVERS = ["Alice", "Rahul", "Mary", "Peter", "Ingrid"]
HOODS = ["Downtown", "Mission", "Harbor"]
RIDE_TYPES = ["Regular", "Luxury", "Pool"]
AMOUNTS = ["5", "10", "15", "20", "25", "40", "50", "75", "100"]


class Utt:
    """Utterance builder that records character spans as it goes."""

    def __init__(self):
        self._parts: list[str] = []
        self._spans: list[dict] = []

    def add(self, text: str) -> "Utt":
        self._parts.append(text)
        return self

    def val(self, slot: str, text: str) -> "Utt":
        start = sum(len(p) for p in self._parts)
        self._parts.append(text)
        self._spans.append({"slot": slot, "start": start, "exclusive_end": start + len(text)})
        return self

    def done(self) -> tuple[str, list[dict]]:
        return "".join(self._parts), self._spans


def user_turn(service, intent, utt: Utt, slot_values=None, requested=None):
    text, spans = utt.done()
    return {
        "speaker": "USER",
        "utterance": text,
        "frames": [
            {
                "service": service,
                "state": {
                    "active_intent": intent,
                    "requested_slots": list(requested or []),
                    "slot_values": {k: list(v) for k, v in (slot_values or {}).items()},
                },
                "slots": spans,
                "actions": [],
            }
        ],
    }


def system_turn(service, text, actions):
    return {
        "speaker": "SYSTEM",
        "utterance": text,
        "frames": [{"service": service, "slots": [], "actions": actions}],
    }


def act(kind, slot="", values=()):
    return {"act": kind, "slot": slot, "values": list(values)}


def int_text(rng, value: str) -> str:
    """Digit or word surface form for an integer value, at random."""
    return value if rng.random() < 0.5 else number_to_words(int(value))


def gen_cafes(rng, did):
    name = rng.choice(CAFE_NAMES)
    n = str(rng.randint(1, 6))
    n_text = int_text(rng, n)
    if rng.random() < 0.5:
        values1 = {"cafe_name": [name], "party_size": [n]}
        turns = [
            user_turn(
                "Cafes_1",
                "BookCafe",
                Utt().add("I want to book a table at ").val("cafe_name", name).add(
                    f" for {n_text} people."
                ),
                values1,
            ),
            system_turn(
                "Cafes_1",
                f"Booking a table at {name} for {n} people. Is that correct?",
                [act("CONFIRM", "cafe_name", [name]), act("CONFIRM", "party_size", [n])],
            ),
            user_turn(
                "Cafes_1",
                "BookCafe",
                Utt().add("Yes, that works. Do they offer outdoor seating?"),
                values1,
                requested=["outdoor_seating"],
            ),
            system_turn(
                "Cafes_1",
                "They do offer outdoor seating.",
                [act("INFORM", "outdoor_seating", ["True"])],
            ),
            user_turn(
                "Cafes_1",
                "BookCafe",
                Utt().add("Perfect, we will sit outside then."),
                {**values1, "outdoor_seating": ["True"]},
            ),
            system_turn("Cafes_1", "Your table is booked. Enjoy!", [act("NOTIFY_SUCCESS")]),
        ]
    else:
        hood = rng.choice(HOODS)
        turns = [
            user_turn(
                "Cafes_1",
                "FindCafe",
                Utt().add("Are there any good cafes in the ").val("neighborhood", hood).add(
                    " area?"
                ),
                {"neighborhood": [hood]},
            ),
            system_turn(
                "Cafes_1",
                f"I found {name} in {hood}.",
                [act("OFFER", "cafe_name", [name]), act("INFORM", "neighborhood", [hood])],
            ),
            user_turn(
                "Cafes_1",
                "BookCafe",
                Utt().add("Book ").val("cafe_name", name).add(" in ").val(
                    "neighborhood", hood
                ).add(f" for {n_text} people please."),
                {"neighborhood": [hood], "cafe_name": [name], "party_size": [n]},
            ),
            system_turn(
                "Cafes_1",
                f"Done, {name} for {n} people.",
                [act("CONFIRM", "cafe_name", [name]), act("CONFIRM", "party_size", [n])],
            ),
            user_turn(
                "Cafes_1",
                "BookCafe",
                Utt().add("Thanks a lot."),
                {"neighborhood": [hood], "cafe_name": [name], "party_size": [n]},
            ),
            system_turn("Cafes_1", "Happy to help.", [act("GOODBYE")]),
        ]
    return {"dialogue_id": did, "services": ["Cafes_1"], "turns": turns}


def gen_rides(rng, did):
    dest = rng.choice(DESTINATIONS)
    k = str(rng.randint(1, 4))
    k_text = int_text(rng, k)
    rtype = rng.choice(RIDE_TYPES)
    if rng.random() < 0.5:
        values = {"destination": [dest], "num_riders": [k], "ride_type": [rtype]}
        turns = [
            user_turn(
                "Rides_1",
                "GetRide",
                Utt().add(f"Get me a {rtype} ride to ").val("destination", dest).add(
                    f" for {k_text} riders."
                ),
                values,
            ),
            system_turn(
                "Rides_1",
                f"Your {rtype} ride to {dest} is on the way.",
                [act("INFORM", "ride_type", [rtype]), act("INFORM", "destination", [dest])],
            ),
            user_turn(
                "Rides_1",
                "GetRide",
                Utt().add("Thanks. What will the fare be?"),
                values,
                requested=["fare"],
            ),
            system_turn(
                "Rides_1", "The fare is 18 dollars.", [act("INFORM", "fare", ["18 dollars"])]
            ),
        ]
    else:
        turns = [
            user_turn(
                "Rides_1",
                "GetRide",
                Utt().add("I need a ride to ").val("destination", dest).add("."),
                {"destination": [dest]},
            ),
            system_turn(
                "Rides_1",
                "What kind of ride would you like?",
                [act("REQUEST", "ride_type")],
            ),
            user_turn(
                "Rides_1",
                "GetRide",
                Utt().add(f"Any kind is fine, {k_text} riders."),
                {"destination": [dest], "ride_type": ["dontcare"], "num_riders": [k]},
            ),
            system_turn(
                "Rides_1",
                f"Booked a ride to {dest}.",
                [act("CONFIRM", "destination", [dest])],
            ),
        ]
    return {"dialogue_id": did, "services": ["Rides_1"], "turns": turns}


def gen_payments(rng, did):
    recv, recv2 = rng.sample(RECEIVERS, 2)
    amt, amt2 = rng.sample(AMOUNTS, 2)
    amt_text, amt2_text = int_text(rng, amt), int_text(rng, amt2)
    send_values = {"receiver_name": [recv], "amount": [amt]}
    req_values = {"receiver_name": [recv2], "amount": [amt2]}
    turns = [
        user_turn(
            "Payments_1",
            "SendMoney",
            Utt().add(f"Please send {amt_text} dollars to ").val("receiver_name", recv).add("."),
            send_values,
        ),
        system_turn(
            "Payments_1",
            f"Sent {amt} dollars to {recv}.",
            [act("CONFIRM", "amount", [amt]), act("CONFIRM", "receiver_name", [recv])],
        ),
        user_turn(
            "Payments_1",
            "RequestMoney",
            Utt().add(f"Now request {amt2_text} dollars from ").val(
                "receiver_name", recv2
            ).add("."),
            req_values,
        ),
        system_turn(
            "Payments_1",
            f"Requested {amt2} dollars from {recv2}.",
            [act("CONFIRM", "amount", [amt2]), act("CONFIRM", "receiver_name", [recv2])],
        ),
        user_turn(
            "Payments_1",
            "RequestMoney",
            Utt().add("Make that a private transaction."),
            {**req_values, "private_visibility": ["True"]},
        ),
        system_turn(
            "Payments_1",
            "It is set to private. You can reach support at 415-555-0199 anytime.",
            [act("INFORM", "private_visibility", ["True"])],
        ),
    ]
    return {"dialogue_id": did, "services": ["Payments_1"], "turns": turns}


def gen_multi(rng, did):
    name = rng.choice(CAFE_NAMES)
    n = str(rng.randint(1, 6))
    k = str(rng.randint(1, 4))
    rtype = rng.choice(RIDE_TYPES)
    cafe_values = {"cafe_name": [name], "party_size": [n]}
    turns = [
        user_turn(
            "Cafes_1",
            "BookCafe",
            Utt().add("Book a table at ").val("cafe_name", name).add(
                f" for {int_text(rng, n)} people."
            ),
            cafe_values,
        ),
        system_turn(
            "Cafes_1",
            f"Booked {name} for {n}.",
            [act("CONFIRM", "cafe_name", [name]), act("CONFIRM", "party_size", [n])],
        ),
        {
            "speaker": "USER",
            "utterance": Utt()
            .add(f"Also get me a {rtype} ride to ")
            .val("destination", name)
            .add(f" for {int_text(rng, k)} riders.")
            .done()[0],
            "frames": [
                {
                    "service": "Rides_1",
                    "state": {
                        "active_intent": "GetRide",
                        "requested_slots": [],
                        "slot_values": {
                            "destination": [name],
                            "num_riders": [k],
                            "ride_type": [rtype],
                        },
                    },
                    "slots": [
                        {
                            "slot": "destination",
                            "start": len(f"Also get me a {rtype} ride to "),
                            "exclusive_end": len(f"Also get me a {rtype} ride to ") + len(name),
                        }
                    ],
                    "actions": [],
                }
            ],
        },
        system_turn(
            "Rides_1",
            f"Your {rtype} ride to {name} is booked.",
            [act("INFORM", "destination", [name])],
        ),
    ]
    return {"dialogue_id": did, "services": ["Cafes_1", "Rides_1"], "turns": turns}


def gen_ablation(did, kind, color):
    """Identical text everywhere; only the system action and gold differ."""
    gold = {"color": [color]} if kind == "CONFIRM" else {}
    turns = [
        user_turn("Shirts_1", "BuyShirt", Utt().add("I need a new shirt."), {}),
        system_turn("Shirts_1", "Okay.", [act(kind, "color", [color])]),
        user_turn("Shirts_1", "BuyShirt", Utt().add("Okay."), gold),
    ]
    return {"dialogue_id": did, "services": ["Shirts_1"], "turns": turns}


def gen_corpus(rng, count, prefix):
    makers = [gen_cafes, gen_rides, gen_payments, gen_multi]
    weights = [0.3, 0.3, 0.25, 0.15]
    out = []
    for i in range(count):
        maker = rng.choices(makers, weights)[0]
        out.append(maker(rng, f"{prefix}-{i:03d}"))
    return out


def gen_mrc_separable(rng, count=200):
    """Answer = the position of the marker token; no marker, no answer."""
    vocab = [
        "alpha", "bravo", "delta", "echo", "hotel", "india", "kilo", "lima",
        "mike", "oscar", "romeo", "tango",
    ]
    rows = []
    for i in range(count):
        length = rng.randint(8, 16)
        tokens = [rng.choice(vocab) for _ in range(length)]
        has = i % 4 != 3
        start = end = -1
        if has:
            start = end = rng.randrange(length)
            tokens[start] = "pivot"
        rows.append(
            MrcExample(
                dialogue_id=f"sep-{i:03d}",
                turn_index=0,
                service="synthetic",
                slot="marker",
                ctx_tokens=tuple(tokens),
                pair_tokens=("target", "word"),
                has_answer=has,
                start=start,
                end=end,
            )
        )
    return rows


def gen_wd_separable(rng, count=200):
    """Label = wide[10] AND NOT wide[20]; the text is uninformative."""
    vocab = ["north", "south", "east", "west", "up", "down", "left", "right"]
    rows = []
    for i in range(count):
        wide = [1.0 if rng.random() < 0.25 else 0.0 for _ in range(WIDE_DIM)]
        combo = i % 4
        wide[10] = 1.0 if combo in (0, 1) else 0.0
        wide[20] = 1.0 if combo in (1, 3) else 0.0
        label = 1.0 if (wide[10] == 1.0 and wide[20] == 0.0) else 0.0
        rows.append(
            WdExample(
                task="categorical",
                dialogue_id=f"sep-{i:03d}",
                turn_index=0,
                service="synthetic",
                slot="rule",
                candidate="value",
                ctx_tokens=tuple(rng.choice(vocab) for _ in range(rng.randint(4, 8))),
                pair_tokens=("some", "pair"),
                wide=tuple(wide),
                label=label,
            )
        )
    return rows


LEXICON_ROWS = [
    ("theater", ["broadway", "drama", "stage", "cinema", "acting", "performing", "playhouse"]),
    ("cafe", ["coffeehouse", "coffee shop", "espresso bar", "tearoom"]),
    ("cafes", ["coffeehouses", "coffee shops"]),
    ("ride", ["trip", "lift", "journey"]),
    ("money", ["cash", "funds", "payment"]),
    ("outdoor", ["outside", "open air", "patio"]),
    ("table", ["booth", "seat"]),
]


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = parser.parse_args()
    root = Path(args.out_dir)
    synth = root / "synthetic"
    separable = root / "separable"
    synth.mkdir(parents=True, exist_ok=True)
    separable.mkdir(parents=True, exist_ok=True)

    rng = random.Random(SEED)
    write_json(synth / "schema.json", SCHEMA)
    write_json(synth / "e2e_eval.json", gen_corpus(rng, 20, "eval"))
    write_json(synth / "train.json", gen_corpus(rng, 50, "train"))
    ablation = []
    i = 0
    for rep in range(4):
        for kind in ("CONFIRM", "OFFER"):
            for color in ("red", "blue"):
                ablation.append(gen_ablation(f"abl-{i:03d}", kind, color))
                i += 1
    write_json(synth / "ablation.json", ablation)

    with open(synth / "lexicon.tsv", "w", encoding="utf-8") as fh:
        fh.write("# term<TAB>synonym...\n")
        for term, syns in LEXICON_ROWS:
            fh.write("\t".join([term, *syns]) + "\n")
    write_json(synth / "syn_cache.json", {term: syns for term, syns in LEXICON_ROWS})

    dump_examples_jsonl(str(separable / "mrc_separable.jsonl"), gen_mrc_separable(rng))
    dump_examples_jsonl(str(separable / "wd_separable.jsonl"), gen_wd_separable(rng))
    print(f"fixtures written under {root}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
