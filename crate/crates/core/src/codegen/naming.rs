/// Maps a model name to the Fig. 8 identifier style.
///
/// An underscore goes in wherever a lowercase letter is followed by an
/// uppercase one, then everything is upper-cased, except that a leading
/// `its` in front of an uppercase letter is kept as a role prefix:
///
/// * `MHSiloProcessPort` → `MHSILO_PROCESS_PORT`
/// * `Process2MHSiloIf` → `PROCESS2MHSILO_IF`
/// * `itsProcessPort` → `itsPROCESS_PORT`
/// * `fillingCompleted` → `FILLING_COMPLETED`
///
/// The mapping is idempotent, so identifiers already in this style are
/// returned unchanged. It is not injective (`fooBar` and `FOO_BAR`
/// coincide); such collisions surface as duplicate names.
pub fn to_st_identifier(name: &str) -> String {
    let (mut out, rest) = match name.strip_prefix("its") {
        Some(rest) if rest.starts_with(|c: char| c.is_ascii_uppercase()) => {
            (String::from("its"), rest)
        }
        _ => (String::new(), name),
    };
    let mut prev: Option<char> = None;
    for c in rest.chars() {
        if c.is_ascii_uppercase() && prev.is_some_and(|p| p.is_ascii_lowercase()) {
            out.push('_');
        }
        out.push(c.to_ascii_uppercase());
        prev = Some(c);
    }
    out
}

/// Lexically valid: `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Words of the declaration grammar; not usable as names.
pub const KEYWORDS: &[&str] = &[
    "FUNCTION_BLOCK",
    "END_FUNCTION_BLOCK",
    "INTERFACE",
    "END_INTERFACE",
    "METHOD",
    "END_METHOD",
    "EXTENDS",
    "IMPLEMENTS",
    "VAR_INPUT",
    "END_VAR",
];

/// IEC 61131-3 elementary types accepted as member and parameter types.
pub const ELEMENTARY_TYPES: &[&str] = &[
    "BOOL", "BYTE", "WORD", "DWORD", "LWORD", "SINT", "INT", "DINT", "LINT", "USINT", "UINT",
    "UDINT", "ULINT", "REAL", "LREAL", "TIME", "DATE", "TIME_OF_DAY", "TOD", "DATE_AND_TIME",
    "DT", "STRING", "WSTRING", "CHAR", "WCHAR",
];

pub fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

pub fn is_elementary(name: &str) -> bool {
    ELEMENTARY_TYPES.contains(&name)
}
