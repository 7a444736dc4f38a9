//! Independent oracles and synthetic corpora for the acceptance run.

use std::collections::BTreeSet;

use med::med_core::corpus::{Corpus, Sample};
use med::med_core::edittree::{levenshtein, EditTree};
use med::med_core::poet::{Candidate, PoetStore};
use rand::Rng;

/// Longest common substring by checking every pair of start positions;
/// leftmost in `a`, then in `b`.
pub fn lcs_oracle(a: &[char], b: &[char]) -> (usize, usize, usize) {
    let mut best = (0, 0, 0);
    for i in 0..a.len() {
        for j in 0..b.len() {
            let k = a[i..].iter().zip(&b[j..]).take_while(|(x, y)| x == y).count();
            if k > best.2 {
                best = (i, j, k);
            }
        }
    }
    best
}

/// Wagner-Fischer with a full table.
pub fn levenshtein_oracle(a: &[char], b: &[char]) -> usize {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = d[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = sub.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }
    d[a.len()][b.len()]
}

/// Every string at distance exactly one from `rho` over `alphabet` whose
/// edit tree from `source` is stored for `(s, t)`.
pub fn poet_oracle(store: &PoetStore, alphabet: &[char], source: &str, s: &str, t: &str, rho: &str) -> Vec<Candidate> {
    let chars: Vec<char> = rho.chars().collect();
    let mut neighbours = BTreeSet::new();
    for i in 0..=chars.len() {
        for &c in alphabet {
            let mut v = chars.clone();
            v.insert(i, c);
            neighbours.insert(v.into_iter().collect::<String>());
        }
        if i < chars.len() {
            let mut v = chars.clone();
            v.remove(i);
            neighbours.insert(v.into_iter().collect::<String>());
            for &c in alphabet {
                let mut v = chars.clone();
                v[i] = c;
                neighbours.insert(v.into_iter().collect::<String>());
            }
        }
    }
    let mut out: Vec<Candidate> = neighbours
        .into_iter()
        .filter(|n| levenshtein(n, rho) == 1)
        .filter_map(|form| {
            let key = EditTree::build(source, &form).canonical_key();
            let frequency = store.frequency(s, t, &key);
            (frequency > 0).then_some(Candidate { form, key, frequency })
        })
        .collect();
    out.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.key.cmp(&b.key)));
    out
}

pub fn random_string<R: Rng>(rng: &mut R, alphabet: &[char], max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

/// Any Unicode scalar value, biased towards a few scripts so that common
/// substrings actually occur.
pub fn random_unicode<R: Rng>(rng: &mut R, max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| match rng.gen_range(0..4) {
            0 => rng.gen::<char>(),
            1 => ['ä', 'ö', 'ü', 'ß', 'é'][rng.gen_range(0..5)],
            2 => ['文', '字', 'ж', 'я'][rng.gen_range(0..4)],
            _ => (b'a' + rng.gen_range(0..4)) as char,
        })
        .collect()
}

const CONSONANTS: [char; 12] = ['b', 'd', 'f', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'w'];
const VOWELS: [char; 3] = ['a', 'i', 'o'];

/// CV syllables with an optional final consonant; every stem contains a
/// vowel.
pub fn stem<R: Rng>(rng: &mut R) -> String {
    let mut s = String::new();
    for _ in 0..rng.gen_range(2..4) {
        s.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())]);
        s.push(VOWELS[rng.gen_range(0..VOWELS.len())]);
    }
    if rng.gen_bool(0.5) {
        s.push(CONSONANTS[rng.gen_range(0..CONSONANTS.len())]);
    }
    s
}

pub fn distinct_stems<R: Rng>(rng: &mut R, n: usize, avoid: &BTreeSet<String>) -> Vec<String> {
    let mut seen = avoid.clone();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s = stem(rng);
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

fn umlaut(stem: &str) -> String {
    stem.chars()
        .map(|c| match c {
            'a' => 'ä',
            'o' => 'ö',
            other => other,
        })
        .collect()
}

/// Prefix, suffix, stem-vowel and identity rules, each under two tag pairs.
pub fn eight_pattern_corpus<R: Rng>(rng: &mut R, stems_per_pattern: usize) -> Corpus {
    type Rule = fn(&str) -> String;
    let rules: [(&str, &str, &str, Rule); 8] = [
        ("V,PRS,1", "V,PTCP", "prefix", |s| format!("ge{s}")),
        ("V,PRS,3", "V,PTCP", "prefix", |s| format!("ge{s}")),
        ("N,SG", "N,PL", "suffix", |s| format!("{s}en")),
        ("N,SG,DAT", "N,PL,DAT", "suffix", |s| format!("{s}en")),
        ("ADJ,POS", "ADJ,CMPR", "vowel", umlaut),
        ("N,SG,GEN", "N,PL,GEN", "vowel", umlaut),
        ("V,INF", "V,INF,NEG", "identity", |s| s.to_string()),
        ("ADV", "ADV,EMPH", "identity", |s| s.to_string()),
    ];
    let mut samples = Vec::new();
    for (s, t, _, rule) in rules {
        for st in distinct_stems(rng, stems_per_pattern, &BTreeSet::new()) {
            samples.push(Sample::new(&st, s, t, Some(&rule(&st))).unwrap());
        }
    }
    Corpus::new(samples)
}

pub const TRANSFER_PAIRS: [(&str, &str); 4] = [
    ("V,PRS,1,SG", "V,PTCP"),
    ("V,PRS,2,SG", "V,PTCP"),
    ("V,PRS,3,SG", "V,PTCP"),
    ("V,PST,3,SG", "V,PTCP"),
];

pub fn participle(stem: &str) -> String {
    format!("ge{stem}t")
}

/// Four tag pairs sharing the `ge-…-t` rule; test stems never occur in
/// training.
pub fn transfer_corpora<R: Rng>(rng: &mut R, train_per_pair: usize, test_per_pair: usize) -> (Corpus, Corpus) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut used = BTreeSet::new();
    let all = distinct_stems(rng, TRANSFER_PAIRS.len() * (train_per_pair + test_per_pair), &used);
    used.extend(all.iter().cloned());
    for (k, (s, t)) in TRANSFER_PAIRS.iter().enumerate() {
        let chunk = &all[k * (train_per_pair + test_per_pair)..(k + 1) * (train_per_pair + test_per_pair)];
        for (i, st) in chunk.iter().enumerate() {
            let sample = Sample::new(st, s, t, Some(&participle(st))).unwrap();
            if i < train_per_pair {
                train.push(sample);
            } else {
                test.push(sample);
            }
        }
    }
    (Corpus::new(train), Corpus::new(test))
}

pub fn only_pair(corpus: &Corpus, pair: &(String, String)) -> Corpus {
    Corpus::new(corpus.samples().iter().filter(|s| s.has_pair(pair)).cloned().collect())
}
