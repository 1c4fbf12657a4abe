/* strchr from lib/string.c. The character parameter is a char rather than an
 * int converted with (char)c. */

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures strchr(s, c) == \null || s <= strchr(s, c) <= s + strlen(s);
  @  @/
  @ void strchr_in_range(const char *s, char c)
  @ {
  @   if (*s != '\0' && *s != c)
  @     strchr_in_range(s + 1, c);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(str);
  @  @ requires strchr(str, c) != \null;
  @  @ requires 0 <= i < strchr(str, c) - str;
  @  @ decreases i;
  @  @ ensures str[i] != c;
  @  @/
  @ void strchr_skipped(const char *str, char c, size_t i)
  @ {
  @   if (i > 0 && *str != '\0' && *str != c)
  @     strchr_skipped(str + 1, c, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires strchr(s, c) != \null;
  @  @ decreases strlen(s);
  @  @ ensures \valid(strchr(s, c)) && *strchr(s, c) == c;
  @  @/
  @ void strchr_found(const char *s, char c)
  @ {
  @   if (*s != '\0' && *s != c)
  @     strchr_found(s + 1, c);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ requires strchr(s, c) == \null;
  @  @ requires 0 <= i <= strlen(s);
  @  @ decreases i;
  @  @ ensures s[i] != c;
  @  @/
  @ void strchr_absent(const char *s, char c, size_t i)
  @ {
  @   if (i > 0)
  @     strchr_absent(s + 1, c, i - 1);
  @ }
  @*/

/*@ ghost
  @ /@ lemma
  @  @ requires valid_str(s);
  @  @ decreases strlen(s);
  @  @ ensures strchr(s, '\0') == s + strlen(s);
  @  @/
  @ void strchr_terminator(const char *s)
  @ {
  @   if (*s != '\0')
  @     strchr_terminator(s + 1);
  @ }
  @*/

/*@ requires valid_str(s);
  @ assigns \nothing;
  @ ensures \result == strchr(s, c);
  @ ensures \result == \null || \old(s) <= \result <= \old(s) + strlen(\old(s));
  @*/
char *strchr(const char *s, char c)
{
    /*@ loop invariant \old(s) <= s <= \old(s) + strlen(\old(s));
      @ loop invariant valid_str(s);
      @ loop invariant strlen(s) == strlen(\old(s)) - (s - \old(s));
      @ loop invariant strchr(s, c) == strchr(\old(s), c);
      @ loop variant strlen(s);
      @*/
    for (; *s != c; ++s)
        if (*s == '\0')
            return NULL;
    return (char *)s;
}
