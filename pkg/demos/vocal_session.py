"""Scripted conversation through the offline vocal cascade.

Run:  python3 demos/vocal_session.py
"""

from pathlib import Path

from marvin.vocal import IntentCatalogue, UtteranceFrame, VocalPipeline

root = Path(__file__).resolve().parent.parent
catalogue = IntentCatalogue.load(root / "data" / "catalogue.yaml")
pipe = VocalPipeline(catalogue, poi_names=("kitchen", "bedroom", "bathroom", "dock"))

UTTERANCES = [
    "marvin go to the kitchen",
    "go to the bedroom",              # no trigger word: ignored
    "marvin please follow me around",
    "marvin zxqv blorp",              # nonsense after the trigger
    "marvin walk me to the bathroom with the lights on",
]

t = 0.0
for line in UTTERANCES:
    print(f'>> "{line}"')
    for word in line.split():
        t += 0.1
        out = pipe.process_frame(UtteranceFrame(t, 0.8, word))
        if out.triggered:
            print("   [trigger detected, capturing]")
    for _ in range(12):  # silence closes the capture
        t += 0.1
        out = pipe.process_frame(UtteranceFrame(t, 0.02, None))
        if out.utterance is not None:
            match = out.match
            verdict = (f"{match.task} poi={match.poi!r} score={match.score:.2f}"
                       if match.understood else f"NotUnderstood score={match.score:.2f}")
            print(f"   captured: {out.utterance!r} -> {verdict}")
            print(f"   reply: {out.response}")
    t += 1.0
print("\n(the trigger word itself is runtime-configurable; "
      "the pipeline never touches the network)")
