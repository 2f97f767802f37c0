//! The published structured-text sample, with `...` standing for elided
//! text, and a token matcher that treats `...` as "any tokens".

pub const SAMPLE: &str = "\
FUNCTION_BLOCK MHSILO_CONTROLLER
...
itsPROCESS_PORT:MHSILO_PROCESS_PORT;
itsDRIVER_PORT: MHSILO2DRIVER_PORT;
...
END_FUNCTION_BLOCK

FUNCTION_BLOCK MHSILO_PROCESS_PORT EXTENDS
CONTROLLER2PROCESS_PORT IMPLEMENTS MHSILO_IF
...
itsPROCESS:PROCESS2MHSILO_IF
...
END_FUNCTION_BLOCK

INTERFACE PROCESS2MHSILO_IF
METHOD FILLING_COMPLETED END_METHOD
METHOD POURING_COMPLETED END_METHOD
METHOD HEATING_COMPLETED END_METHOD
METHOD MIXING_COMPLETED END_METHOD
END_INTERFACE
";

pub const WILDCARD: &str = "...";

/// Splits text into identifiers, punctuation and `...`; whitespace only
/// separates.
pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
        } else if let Some(r) = rest.strip_prefix(WILDCARD) {
            out.push(WILDCARD.to_string());
            rest = r;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let end = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            out.push(rest[..end].to_string());
            rest = &rest[end..];
        } else {
            out.push(c.to_string());
            rest = &rest[c.len_utf8()..];
        }
    }
    out
}

/// Whole-sequence match; a wildcard absorbs zero or more tokens.
pub fn matches(pattern: &[String], text: &[String]) -> bool {
    match pattern.split_first() {
        None => text.is_empty(),
        Some((p, rest)) if p == WILDCARD => (0..=text.len()).any(|k| matches(rest, &text[k..])),
        Some((p, rest)) => text.first() == Some(p) && matches(rest, &text[1..]),
    }
}

/// Declarations keyed by `(keyword, name)`, each as its token list.
pub fn declarations(tokens: &[String]) -> Vec<((String, String), Vec<String>)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let kw = tokens[i].clone();
        let end_kw = format!("END_{kw}");
        let name = tokens.get(i + 1).cloned().unwrap_or_default();
        let len = tokens[i..]
            .iter()
            .position(|t| *t == end_kw)
            .unwrap_or_else(|| panic!("{kw} {name} is not closed"))
            + 1;
        out.push(((kw, name), tokens[i..i + len].to_vec()));
        i += len;
    }
    out
}

/// Every declaration of the sample must occur in `emitted` and match it
/// token for token, modulo whitespace and the elisions.
pub fn check(emitted: &str) -> Result<usize, String> {
    let emitted = declarations(&tokens(emitted));
    let sample = declarations(&tokens(SAMPLE));
    for (key, pattern) in &sample {
        let (_, found) = emitted
            .iter()
            .find(|(k, _)| k == key)
            .ok_or_else(|| format!("{} {} not emitted", key.0, key.1))?;
        if !matches(pattern, found) {
            return Err(format!(
                "{} {} differs:\n  sample:  {}\n  emitted: {}",
                key.0,
                key.1,
                pattern.join(" "),
                found.join(" ")
            ));
        }
    }
    Ok(sample.len())
}
