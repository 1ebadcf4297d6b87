"""Randomized gold/prediction corpus pairs for metric property tests.

Every generated frame carries at least one gold slot assignment, the
precondition under which the joint metric can never exceed the average
one (min over a superset vs mean over the gold subset, frame by frame).
"""

import numpy as np

from sgdst.dialogue import (
    ACT_OFFER,
    Action,
    Dialogue,
    Frame,
    SlotSpan,
    State,
    SYSTEM,
    Turn,
    USER,
)
from sgdst.schema import Schema, ServiceDef, SlotDef, IntentDef

SERVICE = "Props_1"

SLOT_POOL = {
    "place": None,  # span
    "area": ("north", "south", "east"),
    "count": ("1", "2", "3", "4", "5"),
    "fancy": ("True", "False"),
}

VALUE_POOL = {
    "place": ("blue bottle", "taco hut", "river cafe", "corner shop"),
    "area": ("north", "south", "east"),
    "count": ("1", "2", "3", "4", "5"),
    "fancy": ("True", "False"),
}

INTENTS = ("NONE", "FindThing", "BookThing")


def property_schema() -> Schema:
    slots = tuple(
        SlotDef(
            name=name,
            description=f"the {name}",
            is_categorical=values is not None,
            possible_values=values or (),
        )
        for name, values in SLOT_POOL.items()
    )
    intents = tuple(
        IntentDef(name=n, description=n.lower()) for n in INTENTS if n != "NONE"
    )
    return Schema(services=(ServiceDef(name=SERVICE, description="things", slots=slots, intents=intents),))


def _random_state(rng: np.random.Generator, min_slots: int) -> State:
    names = list(SLOT_POOL)
    count = int(rng.integers(min_slots, len(names) + 1))
    chosen = list(rng.choice(names, size=count, replace=False)) if count else []
    assignments = []
    for slot in sorted(chosen):
        value = str(rng.choice(VALUE_POOL[slot]))
        values = [value]
        if slot == "place" and rng.random() < 0.3:
            values.append(value.upper())  # second acceptable surface form
        assignments.append((slot, tuple(values)))
    requested = tuple(
        sorted(rng.choice(names, size=int(rng.integers(0, 3)), replace=False).tolist())
    )
    return State(
        active_intent=str(rng.choice(INTENTS)),
        requested_slots=requested,
        slot_values=tuple(assignments),
    )


def _perturb(rng: np.random.Generator, gold: State) -> State:
    assignments = []
    for slot, values in gold.slot_values:
        roll = rng.random()
        if roll < 0.15:
            continue  # dropped slot
        if roll < 0.45:
            value = str(rng.choice(VALUE_POOL[slot]))  # resampled, maybe wrong
        elif roll < 0.6 and slot == "place":
            value = values[0] + " x"  # near miss for fuzzy scoring
        else:
            value = values[0]
        assignments.append((slot, (value,)))
    if rng.random() < 0.2:
        extras = [s for s in SLOT_POOL if s not in dict(assignments)]
        if extras:
            slot = str(rng.choice(extras))
            assignments.append((slot, (str(rng.choice(VALUE_POOL[slot])),)))
    names = list(SLOT_POOL)
    requested = tuple(
        sorted(rng.choice(names, size=int(rng.integers(0, 3)), replace=False).tolist())
    )
    return State(
        active_intent=str(rng.choice(INTENTS)),
        requested_slots=requested,
        slot_values=tuple(sorted(assignments)),
    )


def random_corpus_pair(seed: int, n_dialogues: int = 4):
    """(gold, pred) corpora; every user frame has >= 1 gold assignment."""
    rng = np.random.default_rng(seed)
    gold_dialogues, pred_dialogues = [], []
    for d in range(n_dialogues):
        n_user = int(rng.integers(1, 4))
        gold_turns, pred_turns = [], []
        for ti in range(n_user):
            if ti:
                gold_turns.append(Turn(speaker=SYSTEM, utterance="ok", frames=()))
                pred_turns.append(Turn(speaker=SYSTEM, utterance="ok", frames=()))
            gold_state = _random_state(rng, min_slots=1)
            pred_state = _perturb(rng, gold_state)
            gold_turns.append(
                Turn(
                    speaker=USER,
                    utterance="something",
                    frames=(Frame(service=SERVICE, state=gold_state),),
                )
            )
            pred_turns.append(
                Turn(
                    speaker=USER,
                    utterance="something",
                    frames=(Frame(service=SERVICE, state=pred_state),),
                )
            )
        did = f"prop-{seed}-{d}"
        gold_dialogues.append(
            Dialogue(dialogue_id=did, services=(SERVICE,), turns=tuple(gold_turns))
        )
        pred_dialogues.append(
            Dialogue(dialogue_id=did, services=(SERVICE,), turns=tuple(pred_turns))
        )
    return gold_dialogues, pred_dialogues


PET_SERVICE = "Pets_1"


def pet_schema() -> Schema:
    """A two-slot service small enough to train against in a test."""
    slots = (
        SlotDef(name="animal", description="which animal to adopt"),
        SlotDef(
            name="vaccinated",
            description="whether shots are done",
            is_categorical=True,
            possible_values=("True", "False"),
        ),
    )
    intents = (IntentDef(name="AdoptPet", description="adopt an animal"),)
    return Schema(
        services=(
            ServiceDef(name=PET_SERVICE, description="shelter", slots=slots, intents=intents),
        )
    )


def pet_corpus():
    """Four short dialogues whose labels are recoverable from the text.

    The animal is restated in every user turn so span supervision lands in
    the copied region, and the boolean arrives through a system offer so
    the candidate ranker can read it off an action-history feature.
    """
    corpus = []
    cases = [("dog", "True"), ("cat", "False"), ("ferret", "True"), ("iguana", "False")]
    for i, (animal, vac) in enumerate(cases):
        t0_text = f"i want to adopt a {animal}"
        start0 = t0_text.index(animal)
        s0 = State(active_intent="AdoptPet", slot_values=(("animal", (animal,)),))
        t0 = Turn(
            speaker=USER,
            utterance=t0_text,
            frames=(
                Frame(
                    service=PET_SERVICE,
                    state=s0,
                    spans=(SlotSpan(slot="animal", start=start0, end=start0 + len(animal)),),
                ),
            ),
        )
        word = "is" if vac == "True" else "is not"
        t1 = Turn(
            speaker=SYSTEM,
            utterance=f"there is one that {word} vaccinated, take it?",
            frames=(
                Frame(
                    service=PET_SERVICE,
                    actions=(Action(act=ACT_OFFER, slot="vaccinated", values=(vac,)),),
                ),
            ),
        )
        t2_text = f"yes the {animal} please"
        start2 = t2_text.index(animal)
        s2 = State(
            active_intent="AdoptPet",
            slot_values=(("animal", (animal,)), ("vaccinated", (vac,))),
        )
        t2 = Turn(
            speaker=USER,
            utterance=t2_text,
            frames=(
                Frame(
                    service=PET_SERVICE,
                    state=s2,
                    spans=(SlotSpan(slot="animal", start=start2, end=start2 + len(animal)),),
                ),
            ),
        )
        corpus.append(
            Dialogue(dialogue_id=f"p{i}", services=(PET_SERVICE,), turns=(t0, t1, t2))
        )
    return corpus
