"""
Ten-fold cross-validation of the sentence classifier
====================================================

Sentences are bags of words, optionally joined by the NE types they
mention. When cue words are unreliable the NE types carry real signal.
"""

from evosum import (GeneratorConfig, NoiseConfig, VectorizerConfig, cross_validate,
                    football_pack, generate_synthetic)

pack = football_pack()
noisy = generate_synthetic(GeneratorConfig(seed=1, noise=NoiseConfig(wrong_label=0.3)),
                           pack.registry, pack.ontology)
sentences = noisy.corpus.sentences()
print(len(sentences), "sentences,", len({s.label for s in sentences}), "classes")

for ne in (True, False):
    rep = cross_validate(sentences, k=10, seed=1, config=VectorizerConfig(include_ne_types=ne))
    folds = " ".join(f"{a:.0f}" for a in rep.fold_accuracies)
    print(f"NE types {'on ' if ne else 'off'}  mean {rep.mean_accuracy:.2f}%  "
          f"pooled {rep.pooled_accuracy:.2f}%  folds [{folds}]")

# binary presence instead of counts
rep = cross_validate(sentences, k=10, seed=1, config=VectorizerConfig(binary=True))
print(f"binary features   mean {rep.mean_accuracy:.2f}%")
