/* A property proved for one index is generalized to a whole range by a
 * loop whose invariant quantifies over the indices seen so far. */

/*@ predicate P(char *s, integer j) = s[j] != '\0'; */

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s) && 0 <= j < strlen(s);
  @  @ decreases j;
  @  @ ensures P(s, j);
  @  @/
  @ void aux(const char *s, size_t j)
  @ {
  @   if (j > 0)
  @     aux(s + 1, j - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s) && n <= strlen(s);
  @  @ ensures \forall integer j; 0 <= j < n ==> P(s, j);
  @  @/
  @ void gen(const char *s, size_t n)
  @ {
  @   /@ loop invariant 0 <= i <= n;
  @    @ loop invariant \forall integer j; 0 <= j < i ==> P(s, j);
  @    @ loop variant n - i;
  @    @/
  @   for (size_t i = 0; i < n; i++)
  @     aux(s, i);
  @ }
  @*/
