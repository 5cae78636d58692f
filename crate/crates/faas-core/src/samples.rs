//! Sample ingestion and synthetic generation.
//!
//! The sample file format is a CSV with header `A,Y,Yhat` and one 0/1 triple
//! per line: protected-group membership, actual label, predicted label.

use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::prover::LabeledSample;

pub const CSV_HEADER: &str = "A,Y,Yhat";

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error("missing or malformed header, expected `A,Y,Yhat`")]
    BadHeader,
    #[error("malformed row at line {line}: {reason}")]
    BadRow { line: usize, reason: String },
    #[error("no samples in file")]
    Empty,
    #[error("rates must be 8 non-negative numbers summing to 1, got sum {0}")]
    BadRates(f64),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Parses samples from CSV text. Rows are validated as 0/1 triples and
/// reported with their 1-based file line number on failure.
pub fn parse_csv<R: BufRead>(reader: R) -> Result<Vec<LabeledSample>, SampleError> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, Ok(line))) => line,
        Some((_, Err(e))) => return Err(SampleError::Io(e)),
        None => return Err(SampleError::BadHeader),
    };
    if header.trim() != CSV_HEADER {
        return Err(SampleError::BadHeader);
    }
    let mut samples = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 3 {
            return Err(SampleError::BadRow {
                line: line_no,
                reason: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let mut bits = [0u8; 3];
        for (slot, field) in bits.iter_mut().zip(&fields) {
            *slot = match field.trim() {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(SampleError::BadRow {
                        line: line_no,
                        reason: format!("value `{other}` is not 0 or 1"),
                    })
                }
            };
        }
        samples.push(LabeledSample::from_bits(bits[0], bits[1], bits[2]).expect("validated bits"));
    }
    if samples.is_empty() {
        return Err(SampleError::Empty);
    }
    Ok(samples)
}

pub fn ingest_csv(path: &Path) -> Result<Vec<LabeledSample>, SampleError> {
    let file = std::fs::File::open(path)?;
    parse_csv(std::io::BufReader::new(file))
}

pub fn write_csv(path: &Path, samples: &[LabeledSample]) -> Result<(), SampleError> {
    let mut file = std::fs::File::create(path)?;
    writeln!(file, "{CSV_HEADER}")?;
    for s in samples {
        writeln!(
            file,
            "{},{},{}",
            s.protected as u8, s.actual as u8, s.predicted as u8
        )?;
    }
    Ok(())
}

/// Deterministic synthetic sample set: each row draws its permutation from
/// the given per-permutation probabilities.
pub fn gen_synthetic(n: u64, rates: &[f64; 8], seed: u64) -> Result<Vec<LabeledSample>, SampleError> {
    let total: f64 = rates.iter().sum();
    if rates.iter().any(|r| *r < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(SampleError::BadRates(total));
    }
    let mut cumulative = [0.0f64; 8];
    let mut acc = 0.0;
    for (slot, rate) in cumulative.iter_mut().zip(rates) {
        acc += rate;
        *slot = acc;
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let samples = (0..n)
        .map(|_| {
            let u: f64 = rng.gen();
            let k = cumulative.iter().position(|c| u < *c).unwrap_or(7);
            let bits = k as u8;
            LabeledSample::from_bits(bits >> 2 & 1, bits >> 1 & 1, bits & 1).expect("3-bit value")
        })
        .collect();
    Ok(samples)
}

pub const UNIFORM_RATES: [f64; 8] = [0.125; 8];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prover::{declare_counts, encode_sample};

    #[test]
    fn parses_valid_csv_and_orders_rows() {
        let text = "A,Y,Yhat\n0,1,1\n1,0,0\n";
        let samples = parse_csv(text.as_bytes()).unwrap();
        assert_eq!(samples.len(), 2);
        // Row "0,1,1" is permutation #4.
        assert_eq!(encode_sample(&samples[0]).get(), 4);
        assert_eq!(encode_sample(&samples[1]).get(), 5);
    }

    #[test]
    fn rejects_out_of_domain_values_with_line_number() {
        let text = "A,Y,Yhat\n0,1,1\n2,0,1\n";
        match parse_csv(text.as_bytes()) {
            Err(SampleError::BadRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected BadRow, got {other:?}"),
        }
        let text = "A,Y,Yhat\n0,1\n";
        assert!(matches!(
            parse_csv(text.as_bytes()),
            Err(SampleError::BadRow { line: 2, .. })
        ));
    }

    #[test]
    fn rejects_empty_data_and_bad_header() {
        assert!(matches!(
            parse_csv("A,Y,Yhat\n".as_bytes()),
            Err(SampleError::Empty)
        ));
        assert!(matches!(
            parse_csv("a,b\n0,1,1\n".as_bytes()),
            Err(SampleError::BadHeader)
        ));
        assert!(matches!(parse_csv("".as_bytes()), Err(SampleError::BadHeader)));
    }

    #[test]
    fn csv_round_trips_through_disk() {
        let samples = gen_synthetic(20, &UNIFORM_RATES, 7).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("samples.csv");
        write_csv(&path, &samples).unwrap();
        let back = ingest_csv(&path).unwrap();
        assert_eq!(back, samples);
    }

    #[test]
    fn synthetic_generation_is_deterministic_per_seed() {
        let a = gen_synthetic(50, &UNIFORM_RATES, 1).unwrap();
        let b = gen_synthetic(50, &UNIFORM_RATES, 1).unwrap();
        let c = gen_synthetic(50, &UNIFORM_RATES, 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn concentrated_rates_produce_one_permutation() {
        let mut rates = [0.0; 8];
        rates[7] = 1.0;
        let samples = gen_synthetic(10, &rates, 3).unwrap();
        assert!(samples
            .iter()
            .all(|s| s.protected && s.actual && s.predicted));
    }

    #[test]
    fn uniform_rates_cover_all_permutations_within_binomial_bounds() {
        let n = 4000u64;
        let samples = gen_synthetic(n, &UNIFORM_RATES, 5).unwrap();
        let counts = declare_counts(&samples);
        // Each bucket ~ Binomial(4000, 1/8): mean 500, sd ~ 20.9; allow 6 sd.
        for k in 1..=8u8 {
            let c = counts.get(k) as f64;
            assert!((c - 500.0).abs() < 125.0, "bucket {k} count {c}");
        }
    }

    #[test]
    fn invalid_rates_are_rejected() {
        assert!(matches!(
            gen_synthetic(5, &[0.5; 8], 1),
            Err(SampleError::BadRates(_))
        ));
        let mut negative = UNIFORM_RATES;
        negative[0] = -0.125;
        negative[1] = 0.375;
        assert!(matches!(
            gen_synthetic(5, &negative, 1),
            Err(SampleError::BadRates(_))
        ));
    }
}
