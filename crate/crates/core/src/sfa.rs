//! Symbolic Fourier approximation: sliding windows, truncated DFT, multiple
//! coefficient binning (MCB), word formation and bag-of-words histograms
//! with numerosity reduction.

use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::data::{z_normalize_in_place, LabeledDataset};
use crate::error::{Error, Result};

/// Configuration of one SFA transform / BOSS base classifier.
///
/// `word_length` counts real/imaginary parts, so `word_length / 2` complex
/// coefficients are kept. When `normalize` is set every window is
/// z-normalized and the DC coefficient is skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SfaParameters {
    pub word_length: usize,
    pub alphabet_size: usize,
    pub window_length: usize,
    pub normalize: bool,
}

impl SfaParameters {
    pub fn new(
        word_length: usize,
        alphabet_size: usize,
        window_length: usize,
        normalize: bool,
    ) -> Result<Self> {
        let p = Self {
            word_length,
            alphabet_size,
            window_length,
            normalize,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.word_length;
        if l < 4 || l > 16 || l % 2 != 0 {
            return Err(Error::Parameter(format!(
                "word length {l} must be even and within [4, 16]"
            )));
        }
        if !(2..=26).contains(&self.alphabet_size) {
            return Err(Error::Parameter(format!(
                "alphabet size {} outside [2, 26]",
                self.alphabet_size
            )));
        }
        if self.window_length == 0 {
            return Err(Error::Parameter("window length must be at least 1".into()));
        }
        let needed = if self.normalize { l + 2 } else { l };
        if needed > self.window_length {
            return Err(Error::Parameter(format!(
                "window length {} too short for word length {l} (normalize={})",
                self.window_length, self.normalize
            )));
        }
        // Packed words must fit in 64 bits.
        let mut capacity: u128 = 1;
        for _ in 0..l {
            capacity = capacity.saturating_mul(self.alphabet_size as u128);
        }
        if capacity > u64::MAX as u128 + 1 {
            return Err(Error::Parameter(format!(
                "alphabet {} with word length {l} does not pack into 64 bits",
                self.alphabet_size
            )));
        }
        Ok(())
    }

    /// Validates the parameters against a concrete series length.
    pub fn validate_for_series_length(&self, m: usize) -> Result<()> {
        self.validate()?;
        if self.window_length > m {
            return Err(Error::Parameter(format!(
                "window length {} exceeds series length {m}",
                self.window_length
            )));
        }
        Ok(())
    }
}

/// Per-coefficient discretization thresholds: one row per word position,
/// each row holding the `alphabet_size - 1` interior bin boundaries in
/// ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Breakpoints {
    rows: Vec<Vec<f64>>,
}

impl Breakpoints {
    /// Builds breakpoints from raw rows, validating shape and ordering.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() || rows.len() > 16 {
            return Err(Error::Parameter(format!(
                "breakpoints need 1..=16 rows, got {}",
                rows.len()
            )));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::Parameter(
                "breakpoints need at least one threshold per row".into(),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Parameter(format!(
                    "breakpoint row {i} has {} thresholds, expected {cols}",
                    row.len()
                )));
            }
            if row.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::Parameter(format!(
                    "breakpoint row {i} is not non-decreasing"
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn word_length(&self) -> usize {
        self.rows.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.rows[0].len() + 1
    }
}

/// An SFA word: `word_length` symbols packed base `alphabet_size`, symbol
/// `i` occupying digit `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(u64);

impl Word {
    pub fn from_symbols(symbols: &[u8], alphabet_size: usize) -> Word {
        let base = alphabet_size as u64;
        let mut packed: u64 = 0;
        let mut digit: u64 = 1;
        for &s in symbols {
            debug_assert!((s as usize) < alphabet_size);
            packed += s as u64 * digit;
            digit = digit.saturating_mul(base);
        }
        Word(packed)
    }

    pub fn packed(self) -> u64 {
        self.0
    }

    /// Rebuilds a word from its packed value (the shape is implicit).
    pub fn from_packed(packed: u64) -> Word {
        Word(packed)
    }

    /// Recovers the symbol sequence for a given shape.
    pub fn symbols(self, word_length: usize, alphabet_size: usize) -> Vec<u8> {
        let base = alphabet_size as u64;
        let mut rest = self.0;
        (0..word_length)
            .map(|_| {
                let s = (rest % base) as u8;
                rest /= base;
                s
            })
            .collect()
    }

    /// Letter rendering (`a` = symbol 0), handy in tests and debugging.
    pub fn letters(self, word_length: usize, alphabet_size: usize) -> String {
        self.symbols(word_length, alphabet_size)
            .into_iter()
            .map(|s| (b'a' + s) as char)
            .collect()
    }
}

/// Sparse word-count histogram; absent words have count zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WordHistogram {
    counts: HashMap<Word, u32>,
}

impl WordHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn increment(&mut self, word: Word) {
        *self.counts.entry(word).or_insert(0) += 1;
    }

    pub fn count(&self, word: Word) -> u32 {
        self.counts.get(&word).copied().unwrap_or(0)
    }

    /// Number of distinct words.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| c as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Word, u32)> + '_ {
        self.counts.iter().map(|(&w, &c)| (w, c))
    }

    /// Entries sorted by packed word value, for canonical output.
    pub fn entries_sorted(&self) -> Vec<(Word, u32)> {
        let mut entries: Vec<(Word, u32)> = self.iter().collect();
        entries.sort_unstable_by_key(|&(w, _)| w);
        entries
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (Word, u32)>) -> Result<Self> {
        let mut counts = HashMap::new();
        for (w, c) in entries {
            if c == 0 {
                return Err(Error::Parameter("histogram counts must be positive".into()));
            }
            if counts.insert(w, c).is_some() {
                return Err(Error::Parameter("duplicate histogram word".into()));
            }
        }
        Ok(Self { counts })
    }
}

/// All length-`w` sliding windows of `series`, in order.
pub fn sliding_windows<'a>(series: &'a [f64], w: usize) -> Result<impl Iterator<Item = &'a [f64]>> {
    if w == 0 {
        return Err(Error::Parameter("window length must be at least 1".into()));
    }
    if w > series.len() {
        return Err(Error::Parameter(format!(
            "window length {w} exceeds series length {}",
            series.len()
        )));
    }
    Ok(series.windows(w))
}

fn validate_dft_args(window_len: usize, word_length: usize, normalize: bool) -> Result<()> {
    if word_length < 2 || word_length % 2 != 0 {
        return Err(Error::Parameter(format!(
            "word length {word_length} must be even and at least 2"
        )));
    }
    let needed = if normalize {
        word_length + 2
    } else {
        word_length
    };
    if needed > window_len {
        return Err(Error::Parameter(format!(
            "window of length {window_len} too short for word length {word_length} (normalize={normalize})"
        )));
    }
    Ok(())
}

/// Truncated unnormalized DFT of one window: the first `word_length / 2`
/// complex coefficients as interleaved (re, im) pairs in ascending
/// frequency, starting at the first non-DC coefficient when `normalize` is
/// set. The caller z-normalizes the window beforehand in that case.
pub fn dft_truncated(window: &[f64], word_length: usize, normalize: bool) -> Result<Vec<f64>> {
    validate_dft_args(window.len(), word_length, normalize)?;
    let w = window.len();
    let first = usize::from(normalize);
    let mut out = Vec::with_capacity(word_length);
    for k in first..first + word_length / 2 {
        let mut re = 0.0f64;
        let mut im = 0.0f64;
        for (j, &x) in window.iter().enumerate() {
            let angle = -TAU * (j * k) as f64 / w as f64;
            re += x * angle.cos();
            im += x * angle.sin();
        }
        out.push(re);
        out.push(im);
    }
    Ok(out)
}

/// Precomputed twiddle factors for repeated truncated DFTs at one
/// (window length, word length, normalize) shape. Produces bit-identical
/// results to [`dft_truncated`].
struct DftPlan {
    window_length: usize,
    half_words: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl DftPlan {
    fn new(window_length: usize, word_length: usize, normalize: bool) -> Self {
        let first = usize::from(normalize);
        let half_words = word_length / 2;
        let mut cos = Vec::with_capacity(half_words * window_length);
        let mut sin = Vec::with_capacity(half_words * window_length);
        for k in first..first + half_words {
            for j in 0..window_length {
                let angle = -TAU * (j * k) as f64 / window_length as f64;
                cos.push(angle.cos());
                sin.push(angle.sin());
            }
        }
        Self {
            window_length,
            half_words,
            cos,
            sin,
        }
    }

    fn transform_into(&self, window: &[f64], out: &mut [f64]) {
        debug_assert_eq!(window.len(), self.window_length);
        debug_assert_eq!(out.len(), 2 * self.half_words);
        for c in 0..self.half_words {
            let base = c * self.window_length;
            let cos = &self.cos[base..base + self.window_length];
            let sin = &self.sin[base..base + self.window_length];
            let mut re = 0.0f64;
            let mut im = 0.0f64;
            for j in 0..self.window_length {
                re += window[j] * cos[j];
                im += window[j] * sin[j];
            }
            out[2 * c] = re;
            out[2 * c + 1] = im;
        }
    }
}

/// Runs `f` over the truncated DFT coefficients of every window of
/// `series`, normalizing windows first when the parameters ask for it.
fn for_each_window_coeffs(
    series: &[f64],
    params: &SfaParameters,
    plan: &DftPlan,
    mut f: impl FnMut(&[f64]),
) {
    let w = params.window_length;
    let mut buffer = vec![0.0f64; w];
    let mut coeffs = vec![0.0f64; params.word_length];
    for window in series.windows(w) {
        let window = if params.normalize {
            buffer.copy_from_slice(window);
            z_normalize_in_place(&mut buffer);
            &buffer[..]
        } else {
            window
        };
        plan.transform_into(window, &mut coeffs);
        f(&coeffs);
    }
}

/// Fits MCB breakpoints: for every coefficient position, pools that
/// coefficient across all windows of all train series and places the
/// `alphabet_size - 1` thresholds at equi-depth (equal-frequency) quantile
/// positions, each a midpoint between the straddling ranked values.
pub fn fit_mcb(train: &LabeledDataset, params: &SfaParameters) -> Result<Breakpoints> {
    params.validate_for_series_length(train.series_length())?;
    let l = params.word_length;
    let alpha = params.alphabet_size;

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); l];
    let plan = DftPlan::new(params.window_length, l, params.normalize);
    for (series, _) in train.iter() {
        for_each_window_coeffs(series, params, &plan, |coeffs| {
            for (col, &v) in columns.iter_mut().zip(coeffs) {
                col.push(v);
            }
        });
    }

    let mut rows = Vec::with_capacity(l);
    for col in &mut columns {
        col.sort_unstable_by(f64::total_cmp);
        let n = col.len();
        let mut row = Vec::with_capacity(alpha - 1);
        for k in 1..alpha {
            let idx = k * n / alpha;
            let threshold = if idx == 0 {
                col[0]
            } else if idx >= n {
                col[n - 1]
            } else {
                (col[idx - 1] + col[idx]) / 2.0
            };
            row.push(threshold);
        }
        rows.push(row);
    }
    Breakpoints::from_rows(rows)
}

/// Discretizes one coefficient vector into a word. The symbol for position
/// `c` is the number of thresholds in row `c` strictly below the value, so
/// a value equal to a threshold falls in the lower bin.
pub fn sfa_word(coeffs: &[f64], breakpoints: &Breakpoints) -> Result<Word> {
    if coeffs.len() != breakpoints.word_length() {
        return Err(Error::Parameter(format!(
            "{} coefficients for {} breakpoint rows",
            coeffs.len(),
            breakpoints.word_length()
        )));
    }
    Ok(lookup_word(coeffs, breakpoints))
}

fn lookup_word(coeffs: &[f64], breakpoints: &Breakpoints) -> Word {
    let alphabet = breakpoints.alphabet_size();
    let mut symbols = [0u8; 16];
    for (c, (&v, row)) in coeffs.iter().zip(breakpoints.rows()).enumerate() {
        symbols[c] = row.iter().take_while(|&&t| t < v).count() as u8;
    }
    Word::from_symbols(&symbols[..coeffs.len()], alphabet)
}

/// Transforms a series into its word histogram. Consecutive windows
/// producing the same word count once (numerosity reduction); the first
/// window always counts.
pub fn bag_of_words(
    series: &[f64],
    params: &SfaParameters,
    breakpoints: &Breakpoints,
) -> Result<WordHistogram> {
    params.validate_for_series_length(series.len())?;
    if breakpoints.word_length() != params.word_length
        || breakpoints.alphabet_size() != params.alphabet_size
    {
        return Err(Error::Parameter(
            "breakpoints were fitted with different parameters".into(),
        ));
    }

    let plan = DftPlan::new(params.window_length, params.word_length, params.normalize);
    let mut histogram = WordHistogram::new();
    let mut previous: Option<Word> = None;
    for_each_window_coeffs(series, params, &plan, |coeffs| {
        let word = lookup_word(coeffs, breakpoints);
        if previous != Some(word) {
            histogram.increment(word);
        }
        previous = Some(word);
    });
    Ok(histogram)
}
