//! `--k` values: `3`, `1..6` (inclusive), `1..=6`, `1,3,5`, or a mix.

pub fn parse(text: &str, max_k: usize) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad k value '{s}' in '{text}'"));
        if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi) = (num(lo)?, num(hi.trim_start_matches('='))?);
            if lo > hi {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(num(part)?);
        }
    }
    if out.is_empty() {
        return Err("no k values given".into());
    }
    if let Some(bad) = out.iter().find(|&&k| k == 0 || k > max_k) {
        return Err(format!("k={bad} outside [1, {max_k}]"));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::parse;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse("1..6", 12).unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(parse("1..=3", 12).unwrap(), vec![1, 2, 3]);
        assert_eq!(parse("1,3,5", 12).unwrap(), vec![1, 3, 5]);
        assert_eq!(parse("5, 1..2, 2", 12).unwrap(), vec![1, 2, 5]);
        assert!(parse("0", 12).is_err());
        assert!(parse("13", 12).is_err());
        assert!(parse("13", 16).is_ok());
        assert!(parse("4..2", 12).is_err());
        assert!(parse("x", 12).is_err());
    }
}
