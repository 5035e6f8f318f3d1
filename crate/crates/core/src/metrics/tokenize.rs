/// Sentence punctuation split off the end of a word.
const TRAILING: &[char] = &['.', ',', '!', '?', ';', ':'];

/// Lowercases, splits on whitespace and detaches trailing punctuation, one
/// token per mark. Rendered text is already in this form, so it passes through.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let word = word.to_lowercase();
        let body = word.trim_end_matches(TRAILING);
        if !body.is_empty() {
            out.push(body.to_string());
        }
        out.extend(word[body.len()..].chars().map(String::from));
    }
    out
}

/// True when `phrase` occurs as a contiguous run of `tokens`.
pub fn contains_run<S: AsRef<str>>(tokens: &[S], phrase: &[&str]) -> bool {
    !phrase.is_empty()
        && tokens
            .windows(phrase.len())
            .any(|w| w.iter().zip(phrase).all(|(a, b)| a.as_ref() == *b))
}
