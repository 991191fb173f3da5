"""Teacher-to-student distillation with scarce labels plus unlabeled text.

A 64-d teacher is trained on 16 labeled examples per class; a smaller 32-d
student then learns from the same labels plus teacher-scored unlabeled
pairs (cosine targets for its encoder, soft label distributions for its
head). Accuracy is reported for increasing unlabeled pair budgets.

Run:  python demos/03_distillation.py
"""

from deskfit import (
    Dataset,
    DistillConfig,
    EncoderConfig,
    FitConfig,
    distill,
    evaluate_model,
    fit,
)
from deskfit.corpus import few_shot_indices
from deskfit.synthetic import make_corpus

train, test = make_corpus(
    n_classes=2, train_per_class=200, test_size=500, shared_fraction=0.2, seed=7
)

chosen = few_shot_indices(train, 16, seed=11)
labeled = Dataset(tuple(train.examples[k] for k in chosen), train.label_names)
pool = [ex.text for k, ex in enumerate(train.examples) if k not in set(chosen)]
print(f"labeled set: {len(labeled.examples)} texts; unlabeled pool: {len(pool)} texts")

teacher = fit(labeled, FitConfig(seed=11))
print(f"teacher (64-d): accuracy {evaluate_model(teacher, test, 'accuracy'):.4f}")

student_cfg = FitConfig(seed=99, encoder=EncoderConfig(vocab_buckets=8192, dim=32))
print("\nstudent (32-d) vs unlabeled pair budget:")
print(f"{'pairs':>6} {'accuracy':>9}")
for pair_count in [0, 16, 64, 200, 400]:
    student = distill(
        teacher,
        labeled,
        pool if pair_count > 0 else [],
        DistillConfig(student=student_cfg, pair_count=pair_count, alpha=0.5),
    )
    score = evaluate_model(student, test, "accuracy")
    print(f"{pair_count:>6} {score:>9.4f}")

print("\nwith a budget of zero the student is a plain few-shot fit;")
print("teacher-scored pairs close most of the gap to the teacher")
