//! The finite alphabet of text patterns shared by box path programs
//! (whole-box matching) and text programs (match positions inside a string).

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PatternToken {
    /// A maximal run of exactly `n` digits.
    DigitRun(usize),
    /// Numeric dates (`12/03/2020`, `2020-03-12`) and month-name dates (`Apr 3`, `Apr 3, 2020`).
    Date,
    /// `8:18`, `8:18 PM`, `20:05:11`.
    Time,
    /// Two or more capital letters.
    UpperWord,
    AlnumRun,
    /// `$1,234.50`, `€ 12`, `1234.50`.
    Currency,
    /// End of the text; never matches a whole box.
    EndOfLine,
}

impl fmt::Display for PatternToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternToken::DigitRun(n) => write!(f, "[0-9]{{{n}}}"),
            PatternToken::Date => f.write_str("DATE"),
            PatternToken::Time => f.write_str("TIME"),
            PatternToken::UpperWord => f.write_str("UPPER"),
            PatternToken::AlnumRun => f.write_str("ALNUM"),
            PatternToken::Currency => f.write_str("CURRENCY"),
            PatternToken::EndOfLine => f.write_str("EOL"),
        }
    }
}

const MONTHS: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];

fn is_digit(b: u8) -> bool {
    b.is_ascii_digit()
}

fn is_alnum(b: u8) -> bool {
    b.is_ascii_alphanumeric()
}

fn digits_at(s: &[u8], i: usize) -> usize {
    s[i.min(s.len())..].iter().take_while(|b| is_digit(**b)).count()
}

impl PatternToken {
    /// The fixed tokens every profile contains.
    pub const FIXED: [PatternToken; 5] =
        [PatternToken::Date, PatternToken::Time, PatternToken::EndOfLine, PatternToken::UpperWord, PatternToken::Currency];

    /// Can this token match a whole box text at all.
    pub fn matches_boxes(&self) -> bool {
        !matches!(self, PatternToken::EndOfLine)
    }

    /// Whole-text anchored match (surrounding whitespace ignored).
    pub fn matches_whole(&self, text: &str) -> bool {
        let t = text.trim();
        if t.is_empty() || !self.matches_boxes() {
            return false;
        }
        self.match_at(t.as_bytes(), 0) == Some(t.len())
    }

    /// All non-overlapping matches as byte ranges, leftmost-longest.
    pub fn find_all(&self, text: &str) -> Vec<(usize, usize)> {
        if let PatternToken::EndOfLine = self {
            return alloc::vec![(text.len(), text.len())];
        }
        let s = text.as_bytes();
        let mut out = Vec::new();
        let mut i = 0;
        while i < s.len() {
            if text.is_char_boundary(i) {
                if let Some(len) = self.match_at(s, i) {
                    if len > 0 {
                        out.push((i, i + len));
                        i += len;
                        continue;
                    }
                }
            }
            i += 1;
        }
        out
    }

    /// Length of the longest match starting at byte `i`.
    fn match_at(&self, s: &[u8], i: usize) -> Option<usize> {
        let prev = if i == 0 { None } else { Some(s[i - 1]) };
        match *self {
            PatternToken::DigitRun(n) => {
                if prev.is_some_and(is_digit) {
                    return None;
                }
                (n > 0 && digits_at(s, i) == n).then_some(n)
            }
            PatternToken::Date => {
                if prev.is_some_and(is_alnum) {
                    return None;
                }
                [numeric_date(s, i), iso_date(s, i), month_date(s, i)].into_iter().flatten().max()
            }
            PatternToken::Time => {
                if prev.is_some_and(is_digit) {
                    return None;
                }
                time(s, i)
            }
            PatternToken::UpperWord => {
                if prev.is_some_and(is_alnum) {
                    return None;
                }
                let n = s[i..].iter().take_while(|b| b.is_ascii_uppercase()).count();
                let next = s.get(i + n).copied();
                (n >= 2 && !next.is_some_and(is_alnum)).then_some(n)
            }
            PatternToken::AlnumRun => {
                if prev.is_some_and(is_alnum) {
                    return None;
                }
                let n = s[i..].iter().take_while(|b| is_alnum(**b)).count();
                (n > 0).then_some(n)
            }
            PatternToken::Currency => {
                if prev.is_some_and(is_alnum) {
                    return None;
                }
                currency(s, i)
            }
            PatternToken::EndOfLine => (i == s.len()).then_some(0),
        }
    }
}

fn numeric_date(s: &[u8], i: usize) -> Option<usize> {
    let mut j = i;
    for part in 0..3 {
        let n = digits_at(s, j);
        let ok = if part < 2 { (1..=2).contains(&n) } else { n == 2 || n == 4 };
        if !ok {
            return None;
        }
        j += n;
        if part < 2 {
            match s.get(j) {
                Some(b'/') | Some(b'.') | Some(b'-') => j += 1,
                _ => return None,
            }
        }
    }
    Some(j - i)
}

fn iso_date(s: &[u8], i: usize) -> Option<usize> {
    let mut j = i;
    for (part, want) in [4usize, 2, 2].into_iter().enumerate() {
        if digits_at(s, j) != want {
            return None;
        }
        j += want;
        if part < 2 {
            if s.get(j) != Some(&b'-') {
                return None;
            }
            j += 1;
        }
    }
    Some(j - i)
}

fn month_date(s: &[u8], i: usize) -> Option<usize> {
    let rest = &s[i..];
    let m = MONTHS.iter().find(|m| rest.starts_with(m.as_bytes()))?;
    let mut j = i + m.len();
    // full month names: consume the remaining lowercase letters
    j += s[j..].iter().take_while(|b| b.is_ascii_lowercase()).count();
    if s.get(j) == Some(&b'.') {
        j += 1;
    }
    if s.get(j) != Some(&b' ') {
        return None;
    }
    j += 1;
    let d = digits_at(s, j);
    if !(1..=2).contains(&d) {
        return None;
    }
    j += d;
    if s.get(j) == Some(&b',') && s.get(j + 1) == Some(&b' ') && digits_at(s, j + 2) == 4 {
        j += 6;
    }
    Some(j - i)
}

fn time(s: &[u8], i: usize) -> Option<usize> {
    let h = digits_at(s, i);
    if !(1..=2).contains(&h) {
        return None;
    }
    let mut j = i + h;
    if s.get(j) != Some(&b':') || digits_at(s, j + 1) != 2 {
        return None;
    }
    j += 3;
    if s.get(j) == Some(&b':') && digits_at(s, j + 1) == 2 {
        j += 3;
    }
    let mut k = j;
    if s.get(k) == Some(&b' ') {
        k += 1;
    }
    if let (Some(a), Some(m)) = (s.get(k), s.get(k + 1)) {
        let after = s.get(k + 2).copied();
        if matches!(a, b'A' | b'a' | b'P' | b'p') && matches!(m, b'M' | b'm') && !after.is_some_and(is_alnum) {
            j = k + 2;
        }
    }
    Some(j - i)
}

fn currency(s: &[u8], i: usize) -> Option<usize> {
    let mut j = i;
    let mut symbol = false;
    for sym in ["$", "\u{20ac}", "\u{a3}"] {
        if s[j..].starts_with(sym.as_bytes()) {
            j += sym.len();
            symbol = true;
            break;
        }
    }
    if symbol && s.get(j) == Some(&b' ') {
        j += 1;
    }
    let lead = digits_at(s, j);
    if lead == 0 {
        return None;
    }
    j += lead;
    let mut grouped = lead <= 3;
    while grouped && s.get(j) == Some(&b',') && digits_at(s, j + 1) == 3 {
        j += 4;
        if digits_at(s, j) != 0 {
            grouped = false;
        }
    }
    let mut cents = false;
    if s.get(j) == Some(&b'.') && digits_at(s, j + 1) == 2 {
        j += 3;
        cents = true;
    }
    if digits_at(s, j) != 0 {
        return None;
    }
    (symbol || cents).then_some(j - i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn digit_runs_are_exact_and_maximal() {
        let p = PatternToken::DigitRun(13);
        assert!(p.matches_whole("4713872198212"));
        assert!(!p.matches_whole("47138721982120"));
        assert!(!p.matches_whole("28298"));
        assert_eq!(PatternToken::DigitRun(5).find_all("ab 28298 123456"), vec![(3, 8)]);
    }

    #[test]
    fn dates() {
        for d in ["12/03/2020", "1.2.20", "2020-03-12", "Apr 3", "April 3, 2020", "Sep. 30"] {
            assert!(PatternToken::Date.matches_whole(d), "{d}");
        }
        for d in ["12/03", "Depart:", "4713872198212"] {
            assert!(!PatternToken::Date.matches_whole(d), "{d}");
        }
    }

    #[test]
    fn times() {
        assert_eq!(PatternToken::Time.find_all("Friday, Apr 3 8:18 PM"), vec![(14, 21)]);
        assert!(PatternToken::Time.matches_whole("20:05:11"));
        assert!(!PatternToken::Time.matches_whole("8:1"));
    }

    #[test]
    fn upper_and_alnum() {
        assert!(PatternToken::UpperWord.matches_whole("SHX"));
        assert!(!PatternToken::UpperWord.matches_whole("Shx"));
        assert_eq!(PatternToken::UpperWord.find_all("To Denver (DEN)"), vec![(11, 14)]);
        assert_eq!(PatternToken::AlnumRun.find_all("2L SHX-3"), vec![(0, 2), (3, 6), (7, 8)]);
    }

    #[test]
    fn currency() {
        for c in ["$12,345.00", "$ 12", "1234.50", "\u{20ac}99.99"] {
            assert!(PatternToken::Currency.matches_whole(c), "{c}");
        }
        assert!(!PatternToken::Currency.matches_whole("1234"));
        assert!(!PatternToken::Currency.matches_whole("12/03/2020"));
    }

    #[test]
    fn end_of_line_is_a_position_only() {
        assert_eq!(PatternToken::EndOfLine.find_all("abc"), vec![(3, 3)]);
        assert!(!PatternToken::EndOfLine.matches_whole("abc"));
    }
}
