/* strcspn from lib/string.c, with the strchr() call hoisted. */

/*@ requires valid_str(s);
  @ assigns \nothing;
  @ allocates \nothing;
  @ ensures \result == strchr(s, c);
  @*/
char *strchr(const char *s, char c);

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures 0 <= strcspn(s, reject) <= strlen(s);
  @  @/
  @ void strcspn_in_range(const char *s, const char *reject)
  @ {
  @   if (*s != '\0')
  @     strcspn_in_range(s + 1, reject);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires 0 <= i < strcspn(s, reject);
  @  @ decreases i;
  @  @ ensures s[i] != '\0' && strchr(reject, s[i]) == \null;
  @  @/
  @ void strcspn_rejected(const char *s, const char *reject, size_t i)
  @ {
  @   if (i > 0)
  @     strcspn_rejected(s + 1, reject, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures s[strcspn(s, reject)] == '\0' || strchr(reject, s[strcspn(s, reject)]) != \null;
  @  @/
  @ void strcspn_stops(const char *s, const char *reject)
  @ {
  @   if (*s != '\0')
  @     strcspn_stops(s + 1, reject);
  @ }
  @*/

/*@ requires valid_str(s) && valid_str(reject);
  @ assigns \nothing;
  @ ensures \result == strcspn(s, reject);
  @*/
size_t strcspn(const char *s, const char *reject)
{
    const char *p;

    /*@ loop invariant s <= p <= s + strlen(s);
      @ loop invariant valid_str(p);
      @ loop invariant strlen(p) == strlen(s) - (p - s);
      @ loop invariant strcspn(s, reject) == (p - s) + strcspn(p, reject);
      @ loop variant strlen(p);
      @*/
    for (p = s; *p != '\0'; ++p) {
        char *r = strchr(reject, *p);
        if (r)
            break;
    }
    return p - s;
}
