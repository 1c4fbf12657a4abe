/* strspn from lib/string.c. The strchr() call is hoisted out of the
 * condition; strchr itself is used through its contract. */

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
  @  @ ensures 0 <= strspn(s, accept) <= strlen(s);
  @  @/
  @ void strspn_in_range(const char *s, const char *accept)
  @ {
  @   if (*s != '\0')
  @     strspn_in_range(s + 1, accept);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires 0 <= i < strspn(s, accept);
  @  @ decreases i;
  @  @ ensures s[i] != '\0' && strchr(accept, s[i]) != \null;
  @  @/
  @ void strspn_accepted(const char *s, const char *accept, size_t i)
  @ {
  @   if (i > 0)
  @     strspn_accepted(s + 1, accept, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures s[strspn(s, accept)] == '\0' || strchr(accept, s[strspn(s, accept)]) == \null;
  @  @/
  @ void strspn_stops(const char *s, const char *accept)
  @ {
  @   if (*s != '\0')
  @     strspn_stops(s + 1, accept);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires 0 <= i <= strspn(s, accept);
  @  @ decreases i;
  @  @ ensures strspn(s + i, accept) == strspn(s, accept) - i;
  @  @/
  @ void strspn_shift(const char *s, const char *accept, size_t i)
  @ {
  @   if (i > 0)
  @     strspn_shift(s + 1, accept, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s) && \valid(accept) && *accept == '\0';
  @  @ ensures strspn(s, accept) == 0;
  @  @/
  @ void strspn_empty_accept(const char *s, const char *accept)
  @ {
  @ }
  @*/

/*@ ghost
  @ /@ requires valid_str(accept);
  @  @ assigns \nothing;
  @  @ ensures \result != 0 <==> strchr(accept, c) != \null;
  @  @/
  @ int accepts(const char *accept, char c)
  @ {
  @   const char *q = accept;
  @   /@ loop invariant accept <= q <= accept + strlen(accept);
  @    @ loop invariant valid_str(q);
  @    @ loop invariant strlen(q) == strlen(accept) - (q - accept);
  @    @ loop invariant strchr(q, c) == strchr(accept, c);
  @    @ loop variant strlen(q);
  @    @/
  @   while (*q != '\0') {
  @     if (*q == c)
  @       return 1;
  @     q++;
  @   }
  @   return c == '\0';
  @ }
  @*/

/*@ requires valid_str(s) && valid_str(accept);
  @ assigns \nothing;
  @ ensures \result == strspn(s, accept);
  @*/
size_t strspn(const char *s, const char *accept)
{
    const char *p;

    /*@ loop invariant s <= p <= s + strlen(s);
      @ loop invariant valid_str(p);
      @ loop invariant strlen(p) == strlen(s) - (p - s);
      @ loop invariant strspn(s, accept) == (p - s) + strspn(p, accept);
      @ loop variant strlen(p);
      @*/
    for (p = s; *p != '\0'; ++p) {
        char *a = strchr(accept, *p);
        if (!a)
            break;
    }
    return p - s;
}
