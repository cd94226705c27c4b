use criterion::{black_box, criterion_group, criterion_main, Criterion};
use polarbench::eval::parse_answer;
use polarbench::taskgen::{generate_dataset, AnswerType, GenConfig};

fn pipeline(c: &mut Criterion) {
    let cfg = GenConfig {
        n_per_task: 2,
        ..GenConfig::default()
    };
    c.bench_function("generate_2_per_task", |b| b.iter(|| generate_dataset(black_box(&cfg)).unwrap()));

    let set = generate_dataset(&cfg).unwrap();
    let instances = set.instances();
    c.bench_function("render_all_instances", |b| {
        b.iter(|| {
            for inst in &instances {
                black_box(inst.render().unwrap());
            }
        })
    });

    let reply = "The knight can reach T in several ways.\n\nLet me count again carefully.\n\nAnswer: **C**";
    c.bench_function("parse_option_label", |b| {
        b.iter(|| parse_answer(black_box(reply), AnswerType::OptionLabel))
    });
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
