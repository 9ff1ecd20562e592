use std::fs;

use qcartier_core::cache::{ArtifactCache, CacheOutcome};
use qcartier_core::{Integers, Residues};

#[test]
fn disk_entries_survive_a_new_handle() {
    let dir = tempfile::tempdir().unwrap();
    let (d1, o1) = ArtifactCache::new(Some(dir.path()), "1").dictionary(0, 30, &Integers).unwrap();
    let cache = ArtifactCache::new(Some(dir.path()), "1");
    assert!(cache.is_persistent());
    let (d2, o2) = cache.dictionary(0, 30, &Integers).unwrap();
    let (d3, o3) = cache.dictionary(0, 20, &Integers).unwrap();
    assert_eq!((o1, o2, o3), (CacheOutcome::Built, CacheOutcome::Hit, CacheOutcome::HitTruncated));
    assert_eq!(d1.t(), d2.t());
    assert_eq!(d3.t(), &d1.t().truncated(20));
}

#[test]
fn corrupted_entries_are_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let ring = Residues::new(7, 6).unwrap();
    let (fresh, _) = ArtifactCache::new(Some(dir.path()), "1").dictionary(7, 40, &ring).unwrap();
    for (i, entry) in fs::read_dir(dir.path()).unwrap().enumerate() {
        let path = entry.unwrap().path();
        if i % 2 == 0 {
            fs::write(&path, "not json").unwrap();
        } else {
            // valid JSON whose checksum no longer matches
            let text = fs::read_to_string(&path).unwrap().replacen("\"payload\":\"", "\"payload\":\" ", 1);
            fs::write(&path, text).unwrap();
        }
    }
    let cache = ArtifactCache::new(Some(dir.path()), "1");
    let (rebuilt, outcome) = cache.dictionary(7, 40, &ring).unwrap();
    assert_eq!(outcome, CacheOutcome::Rebuilt);
    assert_eq!(rebuilt.c_mix(), fresh.c_mix());
    assert_eq!(cache.dictionary(7, 40, &ring).unwrap().1, CacheOutcome::Hit);
}

#[test]
fn version_bump_invalidates() {
    let dir = tempfile::tempdir().unwrap();
    ArtifactCache::new(Some(dir.path()), "1").sequences(30).unwrap();
    let (_, same) = ArtifactCache::new(Some(dir.path()), "1").sequences(30).unwrap();
    let (seq, bumped) = ArtifactCache::new(Some(dir.path()), "2").sequences(30).unwrap();
    assert_eq!(same, CacheOutcome::Hit);
    assert_eq!(bumped, CacheOutcome::Built);
    assert_eq!(seq.a(2).to_string(), "864");
}

#[test]
fn unusable_directory_degrades_to_memory() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cache = ArtifactCache::new(Some(&blocker.join("sub")), "1");
    assert!(!cache.is_persistent());
    assert_eq!(cache.sequences(10).unwrap().1, CacheOutcome::Built);
    assert_eq!(cache.sequences(10).unwrap().1, CacheOutcome::Hit);
}
