//! Acceptance suite. Runs each criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strip_core::decode::{ml_chain, ml_exhaustive, NoiseModel};
use strip_core::families::chain_stack_model;
use strip_core::sim::{count_failures, format_g12};
use strip_core::{
    analytic_rep, bench, build, deform_and_check, run_sim, BitMatrix, BitVector, DecoderKind,
    DetectorModel, DomainAssignment, FamilyId, Pauli, PauliString, SimConfig, SingleQubitClifford,
    StripwiseDecoder,
};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

const TABLE: [(&str, usize, [usize; 7]); 18] = [
    ("XZZX", 3, [3, 1, 2, 0, 0, 4, 9]),
    ("XZZX", 4, [5, 1, 3, 0, 0, 9, 16]),
    ("XZZX", 5, [7, 1, 4, 0, 0, 16, 25]),
    ("DWCC", 3, [3, 2, 2, 0, 0, 6, 9]),
    ("DWCC", 4, [4, 3, 3, 0, 0, 12, 16]),
    ("DWCC", 5, [5, 4, 4, 0, 0, 20, 25]),
    ("X3Z3", 3, [2, 2, 2, 0, 0, 4, 9]),
    ("X3Z3", 4, [2, 3, 3, 0, 0, 6, 16]),
    ("X3Z3", 5, [3, 4, 4, 0, 0, 12, 25]),
    ("DSR", 3, [3, 1, 2, 0, 0, 4, 9]),
    ("DSR", 4, [5, 1, 3, 0, 0, 9, 16]),
    ("DSR", 5, [7, 1, 4, 0, 0, 16, 25]),
    ("CSR", 3, [3, 2, 2, 0, 0, 6, 9]),
    ("CSR", 4, [4, 3, 3, 0, 0, 12, 16]),
    ("CSR", 5, [5, 4, 4, 0, 0, 20, 25]),
    ("HCSR", 3, [2, 2, 2, 0, 0, 4, 9]),
    ("HCSR", 4, [2, 3, 3, 0, 0, 6, 16]),
    ("HCSR", 5, [3, 4, 4, 0, 0, 12, 25]),
];

fn table_stats() -> Verdict {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_stripsym"))
        .args(["stats", "--families", "all", "--L", "3,4,5"])
        .output()
        .map_err(|e| e.to_string())?;
    let took = within(Duration::from_secs(1), start)?;
    ensure(out.status.success(), || {
        format!("exit status {}", out.status)
    })?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    let rows: Vec<&str> = text.lines().skip(1).collect();
    ensure(rows.len() == 18, || format!("{} rows", rows.len()))?;
    for (row, (family, size, expect)) in rows.iter().zip(TABLE) {
        let want = format!(
            "{family},{size},{}",
            expect.map(|v| v.to_string()).join(",")
        );
        ensure(*row == want, || format!("got `{row}`, want `{want}`"))?;
    }
    Ok(format!("18 rows exact in {took:.2?}"))
}

/// Every vector in the span of `h`'s columns, by Gray code over a column basis.
fn column_space(h: &BitMatrix) -> Vec<BitVector> {
    let mut basis: Vec<BitVector> = Vec::new();
    let mut cols = Vec::new();
    for j in 0..h.cols() {
        cols.push(j);
        let rows: Vec<usize> = (0..h.rows()).collect();
        if h.select(&rows, &cols).rank() > basis.len() {
            basis.push(h.column(j));
        } else {
            cols.pop();
        }
    }
    let mut cur = BitVector::zeros(h.rows());
    let mut out = vec![cur.clone()];
    for i in 1u64..(1 << basis.len()) {
        cur.xor_assign(&basis[i.trailing_zeros() as usize]).unwrap();
        out.push(cur.clone());
    }
    out
}

fn factorisation() -> Verdict {
    let start = Instant::now();
    let mut checked = 0usize;
    for family in FamilyId::ALL {
        for size in [3, 4] {
            let model = build(family, size).unwrap().model;
            let h = model.incidence_matrix();
            let mono = DecoderKind::Monolithic
                .prepare(&model)
                .map_err(|e| e.to_string())?;
            let strip = StripwiseDecoder::new(&model).map_err(|e| e.to_string())?;
            let space = column_space(&h);
            ensure(space.len() == 1 << h.rank(), || "span size".into())?;
            for s in &space {
                let a = strip
                    .decode(s)
                    .map_err(|e| format!("{family}({size}) {s}: {e}"))?;
                let b = mono
                    .decode(s)
                    .map_err(|e| format!("{family}({size}) {s}: {e}"))?;
                ensure(a == b, || format!("{family}({size}) mismatch at {s}"))?;
                ensure(h.mat_vec(&a.correction).unwrap() == *s, || {
                    format!("{family}({size}) inconsistent at {s}")
                })?;
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut random = 0usize;
    for family in FamilyId::ALL {
        let model = build(family, 5).unwrap().model;
        let h = model.incidence_matrix();
        let mono = DecoderKind::Monolithic
            .prepare(&model)
            .map_err(|e| e.to_string())?;
        let strip = StripwiseDecoder::new(&model).map_err(|e| e.to_string())?;
        for _ in 0..10_000 {
            let e = BitVector::from_bools(
                &(0..model.n_fault())
                    .map(|_| rng.gen::<bool>())
                    .collect::<Vec<_>>(),
            );
            let s = h.mat_vec(&e).unwrap();
            let a = strip.decode(&s).map_err(|e| e.to_string())?;
            let b = mono.decode(&s).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{family}(5) mismatch at {s}"))?;
            random += 1;
        }
    }
    let took = within(Duration::from_secs(120), start)?;
    Ok(format!(
        "{checked} exhaustive + {random} random syndromes, 0 mismatches in {took:.2?}"
    ))
}

fn repetition_rate() -> Verdict {
    let start = Instant::now();
    for l in [1usize, 3, 5, 7, 9, 11, 21, 63] {
        ensure(analytic_rep(l, 0.5) == 0.5, || {
            format!("analytic_rep({l}, 0.5) != 0.5")
        })?;
    }
    let shots = 100_000;
    let mut points = 0;
    let mut worst: f64 = 0.0;
    for (k, family) in FamilyId::ALL.into_iter().enumerate() {
        for size in [3usize, 5] {
            let cfg = SimConfig {
                family,
                size,
                p_values: vec![0.05, 0.1, 0.2, 0.3, 0.4],
                shots,
                seed: 1000 + 10 * k as u64 + size as u64,
                decoder: DecoderKind::Stripwise,
            };
            for pt in run_sim(&cfg).map_err(|e| e.to_string())? {
                let analytic = analytic_rep(size, pt.p);
                let z = (pt.estimate - analytic).abs() / pt.stderr;
                ensure(z <= 4.0, || {
                    format!(
                        "{family}({size}) p={}: {} vs {analytic} ({z:.2} sigma)",
                        pt.p, pt.estimate
                    )
                })?;
                worst = worst.max(z);
                points += 1;
            }

            // p = 1/2: the estimate must sit on 0.5 within the same band
            let fam = build(family, size).unwrap();
            let decoder = DecoderKind::Stripwise.prepare(&fam.model).unwrap();
            let fails = count_failures(
                &decoder,
                &fam.model,
                &fam.logical_faults[0],
                0.5,
                shots,
                77 + k as u64,
                size as u64,
            )
            .map_err(|e| e.to_string())?;
            let est = fails as f64 / shots as f64;
            let se = (est * (1.0 - est) / shots as f64).sqrt();
            ensure((est - 0.5).abs() <= 4.0 * se, || {
                format!("{family}({size}) p=0.5 estimate {est}")
            })?;
        }
    }
    let took = within(Duration::from_secs(300), start)?;
    Ok(format!(
        "{points} points, worst deviation {worst:.2} sigma, p=0.5 straddled, {took:.2?}"
    ))
}

fn work_ratio() -> Verdict {
    for m in [2usize, 4, 8] {
        for n in [1usize, 3, 7] {
            let r =
                bench(&chain_stack_model(&vec![n + 1; m]), 2.0, 0).map_err(|e| e.to_string())?;
            ensure(r.measured_ratio == m as f64, || {
                format!("m={m} n={n}: ratio {}", r.measured_ratio)
            })?;
        }
    }
    // diagonal k of an L x L grid holds L - |k| qubits and one fewer detectors
    let size = 5i64;
    let dets: Vec<i64> = (-(size - 1)..size).map(|k| size - k.abs() - 1).collect();
    let total: i64 = dets.iter().sum();
    let squares: i64 = dets.iter().map(|d| d * d).sum();
    let expect = (total * total) as f64 / squares as f64;
    let r = bench(&build(FamilyId::Dsr, 5).unwrap().model, 2.0, 0).map_err(|e| e.to_string())?;
    ensure(format_g12(r.measured_ratio) == format_g12(expect), || {
        format!("DSR(5) ratio {} vs {expect}", r.measured_ratio)
    })?;
    ensure(
        (r.measured_ratio - 256.0 / 44.0).abs() <= 1e-12 * expect,
        || "DSR(5) digits".into(),
    )?;
    Ok(format!(
        "balanced ratios exact, DSR(5) {}/{} = {}",
        total * total,
        squares,
        format_g12(r.measured_ratio)
    ))
}

/// Oracle: every fault flips nothing, or exactly two detectors of one strip.
fn pairs_within_strips(model: &DetectorModel) -> bool {
    model.fault_supports().iter().all(|s| match s[..] {
        [] => true,
        [a, b] => model.strip_of_detector()[a] == model.strip_of_detector()[b],
        _ => false,
    })
}

fn random_local_model(rng: &mut ChaCha8Rng, n_strips: usize) -> DetectorModel {
    let strip_of_detector: Vec<usize> = (0..rng.gen_range(n_strips..=4 * n_strips))
        .enumerate()
        .map(|(d, _)| {
            if d < n_strips {
                d
            } else {
                rng.gen_range(0..n_strips)
            }
        })
        .collect();
    let by_strip: Vec<Vec<usize>> = (0..n_strips)
        .map(|j| {
            (0..strip_of_detector.len())
                .filter(|&d| strip_of_detector[d] == j)
                .collect()
        })
        .collect();
    let supports = (0..rng.gen_range(1..12))
        .map(|_| {
            if rng.gen_bool(0.1) {
                return Vec::new();
            }
            let dets = &by_strip[rng.gen_range(0..n_strips)];
            let mut s: Vec<usize> = dets.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            if s.is_empty() {
                s.push(dets[0]);
            }
            s
        })
        .collect();
    DetectorModel::new(
        strip_of_detector.len(),
        n_strips,
        supports,
        strip_of_detector,
    )
    .unwrap()
}

fn equivalence() -> Verdict {
    let mut families = 0;
    for family in FamilyId::ALL {
        for size in 2..=8 {
            let model = build(family, size).unwrap().model;
            let r = model
                .check_strip_symmetric(true)
                .map_err(|e| format!("{family}({size}): {e}"))?;
            ensure(
                r.condition_block == r.condition_one_form && r.strip_symmetric,
                || format!("{family}({size}): {r:?}"),
            )?;
            families += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut symmetric = 0;
    for i in 0..1000 {
        let n_strips = rng.gen_range(1..5);
        let model = random_local_model(&mut rng, n_strips);
        for virtual_boundaries in [false, true] {
            let r = model
                .check_strip_symmetric(virtual_boundaries)
                .map_err(|e| format!("local model {i}: {e}"))?;
            ensure(r.condition_block == r.condition_one_form, || {
                format!("local model {i}")
            })?;
            let oracle_model = if virtual_boundaries {
                model.augment_virtual_boundaries().unwrap()
            } else {
                model.clone()
            };
            let oracle = pairs_within_strips(&oracle_model)
                && oracle_model.check_one_form().iter().all(|&b| b);
            ensure(r.strip_symmetric == oracle, || {
                format!("local model {i} vs oracle")
            })?;
            symmetric += usize::from(r.strip_symmetric);
        }
    }
    for i in 0..100 {
        let n_strips = rng.gen_range(2..5);
        let base = random_local_model(&mut rng, n_strips);
        let by_strip = base.detectors_by_strip();
        let a = rng.gen_range(0..by_strip.len());
        let b = (a + rng.gen_range(1..by_strip.len())) % by_strip.len();
        let mut supports = base.fault_supports().to_vec();
        let mut bad = vec![by_strip[a][0], by_strip[b][0]];
        bad.sort_unstable();
        supports.insert(rng.gen_range(0..=supports.len()), bad);
        let model = DetectorModel::new(
            base.n_det(),
            base.n_strips(),
            supports,
            base.strip_of_detector().to_vec(),
        )
        .unwrap();
        for virtual_boundaries in [false, true] {
            let r = model
                .check_strip_symmetric(virtual_boundaries)
                .map_err(|e| format!("non-local model {i}: {e}"))?;
            ensure(!r.condition_block && !r.condition_one_form, || {
                format!("non-local model {i}: {r:?}")
            })?;
        }
    }
    Ok(format!(
        "{families} family instances, 1000 local models ({symmetric}/2000 symmetric runs), 100 non-local models all agree"
    ))
}

fn letter_image(c: SingleQubitClifford, l: char) -> char {
    match (c, l) {
        (_, 'I') => 'I',
        (SingleQubitClifford::I, l) => l,
        (SingleQubitClifford::H, 'X') => 'Z',
        (SingleQubitClifford::H, 'Z') => 'X',
        (SingleQubitClifford::H, l) => l,
        (SingleQubitClifford::HS, 'X') => 'Y',
        (SingleQubitClifford::HS, 'Y') => 'Z',
        (SingleQubitClifford::HS, _) => 'X',
    }
}

fn oracle_commutes(a: &str, b: &str) -> bool {
    a.chars()
        .zip(b.chars())
        .filter(|&(x, y)| x != 'I' && y != 'I' && x != y)
        .count()
        % 2
        == 0
}

fn chain_detectors(
    strips: usize,
    len: usize,
    letter: Pauli,
) -> (Vec<PauliString>, Vec<usize>, Vec<usize>) {
    let n = strips * len;
    let mut dets = Vec::new();
    let mut det_strip = Vec::new();
    for s in 0..strips {
        for i in 0..len - 1 {
            dets.push(PauliString::on(n, &[s * len + i, s * len + i + 1], letter));
            det_strip.push(s);
        }
    }
    (dets, det_strip, (0..n).map(|q| q / len).collect())
}

fn clifford_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let letters = ['I', 'X', 'Y', 'Z'];
    for t in 0..1000 {
        let n = rng.gen_range(1..=16);
        let a: String = (0..n).map(|_| letters[rng.gen_range(0..4)]).collect();
        let b: String = (0..n).map(|_| letters[rng.gen_range(0..4)]).collect();
        let n_strips = rng.gen_range(1..=n);
        let strips: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n_strips)).collect();
        let cliffords: Vec<SingleQubitClifford> = (0..n_strips)
            .map(|_| SingleQubitClifford::ALL[rng.gen_range(0..3)])
            .collect();
        let assignment = DomainAssignment::new(strips.clone(), cliffords.clone()).unwrap();
        let (p, q): (PauliString, PauliString) = (a.parse().unwrap(), b.parse().unwrap());
        let (pc, qc) = (
            p.conjugate(&assignment).unwrap(),
            q.conjugate(&assignment).unwrap(),
        );
        let image: String = a
            .chars()
            .enumerate()
            .map(|(v, l)| letter_image(cliffords[strips[v]], l))
            .collect();
        ensure(pc.to_string() == image, || {
            format!("trial {t}: {a} -> {pc}, want {image}")
        })?;
        ensure(
            pc.weight() == a.chars().filter(|&c| c != 'I').count(),
            || format!("trial {t}: weight"),
        )?;
        ensure(qc.weight() == q.weight(), || format!("trial {t}: weight"))?;
        let before = oracle_commutes(&a, &b);
        ensure(p.commutes(&q).unwrap() == before, || {
            format!("trial {t}: commutes")
        })?;
        ensure(pc.commutes(&qc).unwrap() == before, || {
            format!("trial {t}: commutation changed")
        })?;
    }

    let (dets, det_strip, qubit_strip) = chain_detectors(3, 5, Pauli::X);
    let all_h = DomainAssignment::uniform(qubit_strip.clone(), SingleQubitClifford::H);
    let r = deform_and_check(&dets, det_strip.clone(), &all_h, &[Pauli::X; 3])
        .map_err(|e| e.to_string())?;
    ensure(
        r.strip_symmetric && r.deformed_symmetry.strip_symmetric,
        || "X-chain: not strip-symmetric".into(),
    )?;
    ensure(
        r.deformed_model.incidence_matrix() == r.parent_model.incidence_matrix(),
        || "X-chain: incidence differs".into(),
    )?;
    ensure(
        r.deformed_detectors
            .iter()
            .all(|d| !d.to_string().contains(['X', 'Y'])),
        || "X-chain: deformed detectors are not Z-type".into(),
    )?;

    // a parent whose dominant faults do flip detectors
    let (dets, det_strip, qubit_strip) = chain_detectors(3, 5, Pauli::Z);
    let all_h = DomainAssignment::uniform(qubit_strip, SingleQubitClifford::H);
    let z =
        deform_and_check(&dets, det_strip, &all_h, &[Pauli::X; 3]).map_err(|e| e.to_string())?;
    let ones = z.deformed_model.incidence_matrix().count_ones();
    ensure(
        z.strip_symmetric && z.incidence_preserved && ones == 24,
        || format!("Z-pair parent: {ones} ones"),
    )?;
    Ok(format!(
        "1000 random pairs invariant; X-chain all-H preserved (incidence bit-equal, {} ones); Z-pair parent preserved ({ones} ones)",
        r.parent_model.incidence_matrix().count_ones()
    ))
}

/// Open chain with `n` faults and `n - 1` detectors; `reversed` numbers the
/// faults from the other end.
fn open_chain(n: usize, reversed: bool) -> BitMatrix {
    let supports: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let f = if reversed { n - 1 - i } else { i };
            let mut s = Vec::new();
            if f > 0 {
                s.push(f - 1);
            }
            if f + 1 < n {
                s.push(f);
            }
            s
        })
        .collect();
    BitMatrix::from_column_supports(n - 1, &supports).unwrap()
}

/// Open chain of `n` detectors without boundary faults.
fn bare_chain(n: usize) -> BitMatrix {
    let supports: Vec<Vec<usize>> = (0..n - 1).map(|f| vec![f, f + 1]).collect();
    BitMatrix::from_column_supports(n, &supports).unwrap()
}

fn chain_oracle() -> Verdict {
    let noise = NoiseModel::new(0.1).unwrap();
    let mut shapes = Vec::new();
    for n in 2..=10 {
        shapes.push(open_chain(n, false));
        shapes.push(open_chain(n, true));
        shapes.push(bare_chain(n));
    }
    let mut syndromes = 0usize;
    for h in &shapes {
        for sm in 0u32..(1 << h.rows()) {
            let s =
                BitVector::from_bools(&(0..h.rows()).map(|i| sm >> i & 1 == 1).collect::<Vec<_>>());
            let a = ml_chain(h, &s).map(|r| r.correction);
            let b = ml_exhaustive(h, &s, &noise).map(|r| r.correction);
            ensure(a == b, || {
                format!("{}x{} chain at {s}: {a:?} vs {b:?}", h.rows(), h.cols())
            })?;
            syndromes += 1;
        }
    }
    Ok(format!(
        "{} chains, {syndromes} syndromes, 0 mismatches",
        shapes.len()
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("table statistics", table_stats),
        ("strip-wise equals monolithic", factorisation),
        ("repetition-rate agreement", repetition_rate),
        ("work ratio", work_ratio),
        ("strip-symmetry conditions agree", equivalence),
        ("Clifford deformation", clifford_properties),
        ("chain decoder oracle", chain_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let verdict = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
