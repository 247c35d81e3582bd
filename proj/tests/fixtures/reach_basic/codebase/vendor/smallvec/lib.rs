// vendored dependency source: references here must never count
pub fn insert_many() {}
pub fn from_utf16() {}
pub fn expand_glob() {}
