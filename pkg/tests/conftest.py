import os

from stylerank.midi import write_midi
from stylerank.synthetic import generate_corpus


def write_style_dir(path, process, count, seed, prefix="f"):
    """Write ``count`` generated pieces of ``process`` as MIDI files under ``path``."""
    os.makedirs(path, exist_ok=True)
    names = []
    for i, notes in enumerate(generate_corpus(process, count, seed)):
        name = f"{prefix}{i:03d}.mid"
        with open(os.path.join(path, name), "wb") as fh:
            fh.write(write_midi(notes))
        names.append(name)
    return names
