/* strpbrk from lib/string.c. */

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures strpbrk(s, accept) == \null ||
  @  @   s <= strpbrk(s, accept) < s + strlen(s);
  @  @/
  @ void strpbrk_in_range(const char *s, const char *accept)
  @ {
  @   if (*s != '\0')
  @     strpbrk_in_range(s + 1, accept);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures strpbrk(s, accept) == \null ||
  @  @   (*strpbrk(s, accept) != '\0' && strchr(accept, *strpbrk(s, accept)) != \null);
  @  @/
  @ void strpbrk_found(const char *s, const char *accept)
  @ {
  @   if (*s != '\0')
  @     strpbrk_found(s + 1, accept);
  @ }
  @*/

/*@ requires valid_str(cs) && valid_str(ct);
  @ assigns \nothing;
  @ ensures \result == strpbrk(cs, ct);
  @*/
char *strpbrk(const char *cs, const char *ct)
{
    const char *sc1;
    const char *sc2;

    /*@ loop invariant cs <= sc1 <= cs + strlen(cs);
      @ loop invariant valid_str(sc1);
      @ loop invariant strlen(sc1) == strlen(cs) - (sc1 - cs);
      @ loop invariant strpbrk(cs, ct) == strpbrk(sc1, ct);
      @ loop variant strlen(sc1);
      @*/
    for (sc1 = cs; *sc1 != '\0'; ++sc1) {
        /*@ loop invariant ct <= sc2 <= ct + strlen(ct);
          @ loop invariant valid_str(sc2);
          @ loop invariant strlen(sc2) == strlen(ct) - (sc2 - ct);
          @ loop invariant strchr(sc2, *sc1) == strchr(ct, *sc1);
          @ loop variant strlen(sc2);
          @*/
        for (sc2 = ct; *sc2 != '\0'; ++sc2) {
            if (*sc1 == *sc2)
                return (char *)sc1;
        }
    }
    return NULL;
}
